from django.core.validators import MinValueValidator, MaxValueValidator
from django.db import models


class CensusRecord(models.Model):
    """
    Census run: how many distinct SIC-POVMs a series of searches produced
    """
    id_census = models.AutoField(primary_key=True)
    dimension = models.PositiveSmallIntegerField(validators=[MinValueValidator(2), MaxValueValidator(64)])
    runs = models.PositiveIntegerField()
    seed = models.BigIntegerField(validators=[MinValueValidator(0)])
    restarts_per_run = models.PositiveIntegerField(default=1)
    count = models.PositiveIntegerField()
    converged_runs = models.PositiveIntegerField(default=0)
    continuum_suspected = models.BooleanField(default=False)
    low_confidence = models.BooleanField(default=False)
    dedup_tol = models.FloatField()
    min_separation = models.FloatField(null=True, blank=True)
    new_solution_curve = models.JSONField(default=list)
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        db_table = 'census_records'
        verbose_name = 'Census Record'
        verbose_name_plural = 'Census Records'
        ordering = ['-created_at']
        indexes = [
            models.Index(fields=['dimension'], name='census_dimension_idx'),
        ]

    def __str__(self):
        return f"Census {self.id_census} - d={self.dimension}: {self.count} SICs over {self.runs} runs"

    @classmethod
    def from_census(cls, result, basis=None):
        """Persist a census together with its representatives"""
        from .files import fiducial_file_for

        record = cls.objects.create(
            dimension=result.d,
            runs=result.runs,
            seed=result.seed,
            restarts_per_run=result.restarts_per_run,
            count=result.count,
            converged_runs=result.converged_runs,
            continuum_suspected=result.continuum_suspected,
            low_confidence=result.low_confidence,
            dedup_tol=result.dedup_tol,
            min_separation=result.min_separation,
            new_solution_curve=[list(point) for point in result.new_solution_curve],
        )
        for fiducial in result.representatives:
            StoredFiducial.from_fiducial_file(
                fiducial_file_for(fiducial, basis, method='search'), converged=True, census=record,
            )
        return record


class StoredFiducial(models.Model):
    """
    Catalogued fiducial vector with its provenance
    """
    METHOD_CHOICES = [
        ('analytic', 'Analytic'),
        ('search', 'Search'),
    ]

    id_fiducial = models.AutoField(primary_key=True)
    dimension = models.PositiveSmallIntegerField(validators=[MinValueValidator(2), MaxValueValidator(64)])
    # [re, im] pairs, as in fiducial files
    amplitudes = models.JSONField()
    # "wh" or an inline error basis
    basis = models.JSONField(default='wh')
    method = models.CharField(max_length=20, choices=METHOD_CHOICES)
    seed = models.BigIntegerField(null=True, blank=True)
    objective = models.FloatField(null=True, blank=True)
    sic_deviation = models.FloatField(null=True, blank=True)
    converged = models.BooleanField(default=False)
    id_census = models.ForeignKey(
        CensusRecord,
        on_delete=models.CASCADE,
        null=True,
        blank=True,
        related_name='fiducials',
        db_column='id_census'
    )
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        db_table = 'fiducials'
        verbose_name = 'Fiducial'
        verbose_name_plural = 'Fiducials'
        ordering = ['-created_at']
        indexes = [
            models.Index(fields=['dimension'], name='fiducials_dimension_idx'),
            models.Index(fields=['method'], name='fiducials_method_idx'),
            models.Index(fields=['created_at'], name='fiducials_created_at_idx'),
        ]

    def __str__(self):
        return f"Fiducial {self.id_fiducial} - d={self.dimension} ({self.method})"

    @classmethod
    def from_fiducial_file(cls, fiducial_file, converged, census=None):
        from .serializers import FiducialFileSerializer

        data = FiducialFileSerializer(fiducial_file).data
        provenance = fiducial_file.provenance
        return cls.objects.create(
            dimension=fiducial_file.d,
            amplitudes=data['amplitudes'],
            basis=data['basis'],
            method=provenance.method,
            seed=provenance.seed,
            objective=provenance.objective,
            sic_deviation=provenance.sic_deviation,
            converged=converged,
            id_census=census,
        )

    def to_fiducial_file(self):
        """Rebuild the fiducial file this row was stored from"""
        from .serializers import FiducialFileSerializer

        serializer = FiducialFileSerializer(data={
            'format_version': 1,
            'd': self.dimension,
            'amplitudes': self.amplitudes,
            'basis': self.basis,
            'provenance': {
                'method': self.method,
                'seed': self.seed,
                'objective': self.objective,
                'sic_deviation': self.sic_deviation,
                'timestamp': self.created_at,
            },
        })
        serializer.is_valid(raise_exception=True)
        return serializer.save()
