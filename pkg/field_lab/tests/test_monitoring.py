from django.test import TestCase

from field_lab.core.config import ScenarioConfig
from field_lab.core.monitoring import Monitoring
from field_lab.models import MetricLog, RunEvent, ScenarioRun


class MonitoringTests(TestCase):
    def setUp(self):
        self.config = ScenarioConfig("propagate", {"run.seed": 2**63 - 1})

    def test_recorded_run(self):
        monitoring = Monitoring(record=True)
        run = monitoring.start_run(self.config, "out")
        self.assertEqual(run.seed, 2**63 - 1)
        self.assertEqual(run.config_hash, self.config.config_hash())

        monitoring.record_row({"energy": 1.5, "label": "x", "pass": True, "steps": 3}, step=4, t=0.04)
        metrics = MetricLog.objects.filter(run=run).order_by("metric_type")
        self.assertEqual([m.metric_type for m in metrics], ["energy", "steps"])
        self.assertEqual(metrics[0].step, 4)

        self.assertTrue(monitoring.record_check("gauss", 1e-14, 1e-12))
        self.assertFalse(monitoring.record_check("gauss", 1e-3, 1e-12))
        monitoring.record_row({"energy": float("nan")}, step=5)
        events = RunEvent.objects.filter(run=run, event_type="ALERT_WARNING")
        self.assertEqual(events.count(), 2)

        monitoring.finish_run("ok", 0)
        run.refresh_from_db()
        self.assertEqual(run.status, "ok")
        self.assertIsNotNone(run.finished_at)

    def test_unrecorded_run_touches_nothing(self):
        monitoring = Monitoring()
        self.assertIsNone(monitoring.start_run(self.config))
        monitoring.record_row({"energy": 1.0})
        self.assertFalse(monitoring.record_check("gauss", 1.0, 0.0))
        monitoring.finish_run("failed", 2)
        self.assertFalse(ScenarioRun.objects.exists())
        self.assertFalse(MetricLog.objects.exists())
        self.assertFalse(RunEvent.objects.exists())
