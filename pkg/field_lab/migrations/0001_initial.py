import django.db.models.deletion
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='ScenarioRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('subcommand', models.CharField(max_length=32)),
                ('config_hash', models.CharField(max_length=64)),
                ('seed', models.BigIntegerField(default=0)),
                ('config_json', models.TextField(default='{}')),
                ('status', models.CharField(choices=[('running', 'running'), ('ok', 'ok'), ('invalid', 'invalid'), ('failed', 'failed')], default='running', max_length=16)),
                ('exit_code', models.IntegerField(blank=True, null=True)),
                ('output_dir', models.CharField(blank=True, default='', max_length=512)),
                ('started_at', models.DateTimeField(auto_now_add=True)),
                ('finished_at', models.DateTimeField(blank=True, null=True)),
            ],
            options={
                'ordering': ['-started_at'],
            },
        ),
        migrations.CreateModel(
            name='MetricLog',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('step', models.IntegerField(default=0)),
                ('t', models.FloatField(default=0.0)),
                ('metric_type', models.CharField(max_length=50)),
                ('value', models.FloatField()),
                ('run', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='metrics', to='field_lab.scenariorun')),
            ],
            options={
                'ordering': ['run', 'step', 'metric_type'],
            },
        ),
        migrations.CreateModel(
            name='RunEvent',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('timestamp', models.DateTimeField(auto_now_add=True)),
                ('event_type', models.CharField(max_length=50)),
                ('message', models.TextField()),
                ('run', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='events', to='field_lab.scenariorun')),
            ],
            options={
                'ordering': ['-timestamp'],
            },
        ),
    ]
