from lattice.management.base import ExperimentCommand


class Command(ExperimentCommand):
    help = 'Tabulate J_CB, psi_j and their convex envelopes on a strain grid.'
    experiment = 'density'

    def describe(self, result):
        super().describe(result)
        density = result.summary['density']
        self.stdout.write(
            f"gamma oracle discrepancy={density['gamma_discrepancy']:.3g}"
        )
        for name, envelope in density['envelopes'].items():
            self.stdout.write(
                f"{name}: kink={envelope['kink']:.6g} "
                f"sup error={envelope['sup_error']:.3g}"
            )
