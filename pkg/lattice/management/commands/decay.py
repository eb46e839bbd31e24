from lattice.management.base import ExperimentCommand


class Command(ExperimentCommand):
    help = 'Certify monotone geometric decay of the K = 2 boundary layer.'
    experiment = 'decay'

    def describe(self, result):
        decay = result.summary['decay']
        self.stdout.write(
            f"lambda={decay['lambda']:.6g} C={decay['C_const']:.6g} "
            f"alpha_lb={decay['alpha_lb']:.6g} "
            f"certified={decay['certified']}"
        )
