from lattice.management.base import ExperimentCommand


class Command(ExperimentCommand):
    help = 'Check the structural hypotheses of the potential family.'
    experiment = 'audit'

    def describe(self, result):
        for check in result.summary['audit']['checks']:
            margin = check['margin']
            margin = '-' if margin is None else f'{margin:.6g}'
            line = f"{check['status']:>7}  {check['name']}  margin={margin}"
            if check['status'] == 'fail':
                line = self.style.ERROR(line)
            self.stdout.write(line)
