from field_lab.management.base import ScenarioCommand


class Command(ScenarioCommand):
    help = "Verify the two-mode U(2)/SU(2) algebra and thermal occupancies."
    subcommand = "fock"

    def add_scenario_arguments(self, parser):
        self.option(parser, "--nmax", "fock.n_max", type=int)
        self.option(parser, "--omega", "fock.omega", type=float)
        self.option(parser, "--temperatures", "fock.temperatures")
