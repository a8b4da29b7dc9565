from field_lab.management.base import ScenarioCommand


class Command(ScenarioCommand):
    help = "Check the Clebsch representation identities and the potential-form equations."
    subcommand = "clebsch"

    def add_scenario_arguments(self, parser):
        self.add_grid_arguments(parser)
        self.option(parser, "--preset", "clebsch.preset")
        self.flag(parser, "--sweep", "clebsch.sweep")
        self.option(parser, "--spacings", "clebsch.spacings")
