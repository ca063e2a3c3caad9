import django_filters
from .models import StoredFiducial, CensusRecord


class StoredFiducialFilter(django_filters.FilterSet):
    """
    Filter for StoredFiducial model
    """
    dimension = django_filters.NumberFilter()
    method = django_filters.ChoiceFilter(choices=StoredFiducial.METHOD_CHOICES)
    census = django_filters.NumberFilter(field_name='id_census')
    max_deviation = django_filters.NumberFilter(field_name='sic_deviation', lookup_expr='lte')
    date_from = django_filters.DateTimeFilter(field_name='created_at', lookup_expr='gte')
    date_to = django_filters.DateTimeFilter(field_name='created_at', lookup_expr='lte')

    class Meta:
        model = StoredFiducial
        fields = ['dimension', 'method', 'converged', 'census', 'max_deviation', 'date_from', 'date_to']


class CensusRecordFilter(django_filters.FilterSet):
    """
    Filter for CensusRecord model
    """
    dimension = django_filters.NumberFilter()
    min_runs = django_filters.NumberFilter(field_name='runs', lookup_expr='gte')

    class Meta:
        model = CensusRecord
        fields = ['dimension', 'continuum_suspected', 'low_confidence', 'min_runs']
