from field_lab.management.base import ScenarioCommand


class Command(ScenarioCommand):
    help = "Evolve the Riemann-Silberstein pair by its spin-1 generator."
    subcommand = "majorana"

    def add_scenario_arguments(self, parser):
        self.add_grid_arguments(parser)
        self.add_run_arguments(parser)
        self.add_initial_arguments(parser)
        self.flag(parser, "--compare", "majorana.compare")
        self.option(parser, "--convention", "majorana.convention")
