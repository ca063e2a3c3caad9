from django.contrib import admin
from .models import StoredFiducial, CensusRecord


class StoredFiducialInline(admin.TabularInline):
    """
    Inline admin for census representatives
    """
    model = StoredFiducial
    extra = 0
    fields = ('id_fiducial', 'dimension', 'sic_deviation', 'created_at')
    readonly_fields = ('id_fiducial', 'dimension', 'sic_deviation', 'created_at')


@admin.register(CensusRecord)
class CensusRecordAdmin(admin.ModelAdmin):
    """
    Census admin interface
    """
    list_display = ('id_census', 'dimension', 'runs', 'seed', 'count', 'continuum_suspected', 'low_confidence', 'created_at')
    list_filter = ('dimension', 'continuum_suspected', 'low_confidence')
    ordering = ('-created_at',)
    inlines = [StoredFiducialInline]

    fieldsets = (
        ('Run', {
            'fields': ('id_census', 'dimension', 'runs', 'seed', 'restarts_per_run', 'dedup_tol')
        }),
        ('Outcome', {
            'fields': ('count', 'converged_runs', 'continuum_suspected', 'low_confidence', 'min_separation', 'new_solution_curve')
        }),
    )

    readonly_fields = ('id_census', 'created_at')


@admin.register(StoredFiducial)
class StoredFiducialAdmin(admin.ModelAdmin):
    """
    Fiducial admin interface
    """
    list_display = ('id_fiducial', 'dimension', 'method', 'seed', 'sic_deviation', 'converged', 'census_id', 'created_at')
    list_filter = ('dimension', 'method', 'converged')
    search_fields = ('id_fiducial', 'seed')
    ordering = ('-created_at',)

    fieldsets = (
        ('Fiducial', {
            'fields': ('id_fiducial', 'dimension', 'amplitudes', 'basis')
        }),
        ('Provenance', {
            'fields': ('method', 'seed', 'objective', 'sic_deviation', 'converged', 'id_census', 'created_at')
        }),
    )

    readonly_fields = ('id_fiducial', 'created_at')

    def census_id(self, obj):
        return obj.id_census_id or "-"
    census_id.short_description = 'Census'
