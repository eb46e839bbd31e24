from lattice.management.base import ExperimentCommand


class Command(ExperimentCommand):
    help = 'Compute the boundary-layer energies and the crack energy beta.'
    experiment = 'layer'

    def describe(self, result):
        super().describe(result)
        beta = result.summary['beta']
        self.stdout.write(
            f"B={beta['B']} B~={beta['B_tilde']:.12g} N={beta['N']} "
            f"discrepancy={beta['discrepancy']:.3g}"
        )
