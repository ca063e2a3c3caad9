# Generated by Django 5.2.7

import django.core.validators
import django.db.models.deletion
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='CensusRecord',
            fields=[
                ('id_census', models.AutoField(primary_key=True, serialize=False)),
                ('dimension', models.PositiveSmallIntegerField(validators=[django.core.validators.MinValueValidator(2), django.core.validators.MaxValueValidator(64)])),
                ('runs', models.PositiveIntegerField()),
                ('seed', models.BigIntegerField(validators=[django.core.validators.MinValueValidator(0)])),
                ('restarts_per_run', models.PositiveIntegerField(default=1)),
                ('count', models.PositiveIntegerField()),
                ('converged_runs', models.PositiveIntegerField(default=0)),
                ('continuum_suspected', models.BooleanField(default=False)),
                ('low_confidence', models.BooleanField(default=False)),
                ('dedup_tol', models.FloatField()),
                ('min_separation', models.FloatField(blank=True, null=True)),
                ('new_solution_curve', models.JSONField(default=list)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'verbose_name': 'Census Record',
                'verbose_name_plural': 'Census Records',
                'db_table': 'census_records',
                'ordering': ['-created_at'],
                'indexes': [models.Index(fields=['dimension'], name='census_dimension_idx')],
            },
        ),
        migrations.CreateModel(
            name='StoredFiducial',
            fields=[
                ('id_fiducial', models.AutoField(primary_key=True, serialize=False)),
                ('dimension', models.PositiveSmallIntegerField(validators=[django.core.validators.MinValueValidator(2), django.core.validators.MaxValueValidator(64)])),
                ('amplitudes', models.JSONField()),
                ('basis', models.JSONField(default='wh')),
                ('method', models.CharField(choices=[('analytic', 'Analytic'), ('search', 'Search')], max_length=20)),
                ('seed', models.BigIntegerField(blank=True, null=True)),
                ('objective', models.FloatField(blank=True, null=True)),
                ('sic_deviation', models.FloatField(blank=True, null=True)),
                ('converged', models.BooleanField(default=False)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
                ('id_census', models.ForeignKey(blank=True, db_column='id_census', null=True, on_delete=django.db.models.deletion.CASCADE, related_name='fiducials', to='fiducials.censusrecord')),
            ],
            options={
                'verbose_name': 'Fiducial',
                'verbose_name_plural': 'Fiducials',
                'db_table': 'fiducials',
                'ordering': ['-created_at'],
                'indexes': [models.Index(fields=['dimension'], name='fiducials_dimension_idx'), models.Index(fields=['method'], name='fiducials_method_idx'), models.Index(fields=['created_at'], name='fiducials_created_at_idx')],
            },
        ),
    ]
