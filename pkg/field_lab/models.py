from django.db import models


class ScenarioRun(models.Model):
    STATUS_CHOICES = [
        ("running", "running"),
        ("ok", "ok"),
        ("invalid", "invalid"),
        ("failed", "failed"),
    ]

    subcommand = models.CharField(max_length=32)
    config_hash = models.CharField(max_length=64)
    seed = models.BigIntegerField(default=0)
    config_json = models.TextField(default="{}")
    status = models.CharField(max_length=16, choices=STATUS_CHOICES, default="running")
    exit_code = models.IntegerField(null=True, blank=True)
    output_dir = models.CharField(max_length=512, blank=True, default="")
    started_at = models.DateTimeField(auto_now_add=True)
    finished_at = models.DateTimeField(null=True, blank=True)

    class Meta:
        ordering = ["-started_at"]

    def __str__(self):
        return f"{self.subcommand}[{self.config_hash[:10]}] {self.status}"


class MetricLog(models.Model):
    run = models.ForeignKey(ScenarioRun, on_delete=models.CASCADE, related_name="metrics")
    step = models.IntegerField(default=0)
    t = models.FloatField(default=0.0)
    metric_type = models.CharField(max_length=50)
    value = models.FloatField()

    class Meta:
        ordering = ["run", "step", "metric_type"]


class RunEvent(models.Model):
    run = models.ForeignKey(ScenarioRun, on_delete=models.CASCADE, related_name="events")
    timestamp = models.DateTimeField(auto_now_add=True)
    event_type = models.CharField(max_length=50)
    message = models.TextField()

    class Meta:
        ordering = ["-timestamp"]
