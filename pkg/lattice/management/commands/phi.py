from lattice.management.base import ExperimentCommand


class Command(ExperimentCommand):
    help = 'Solve the cell problem phi_N(z) for growing N.'
    experiment = 'phi'

    def describe(self, result):
        for row in result.summary['phi']:
            self.stdout.write(
                f"z={row['z']:.6g}: error ~ {row['trend']:.4g}/N, "
                f"monotone={row['monotone']}, sandwich={row['sandwich']}"
            )
