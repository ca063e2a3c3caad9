from rest_framework import serializers
import numpy as np
import logging

from .models import StoredFiducial, CensusRecord
from .wh_group import ErrorBasis

# Set up logging
logger = logging.getLogger(__name__)


class ComplexArrayField(serializers.Field):
    """
    Complex numpy array as nested lists whose innermost entries are
    [re, im] pairs. ``ndim`` is the depth of the complex array itself.
    """
    default_error_messages = {
        'invalid': 'Expected a {ndim}-dimensional array of [re, im] pairs.',
        'not_finite': 'All values must be finite numbers.',
    }

    def __init__(self, ndim=1, **kwargs):
        self.ndim = ndim
        super().__init__(**kwargs)

    def to_representation(self, value):
        array = np.asarray(value, dtype=complex)
        return np.stack([array.real, array.imag], axis=-1).tolist()

    def to_internal_value(self, data):
        try:
            pairs = np.asarray(data, dtype=float)
        except (TypeError, ValueError):
            self.fail('invalid', ndim=self.ndim)
        if pairs.ndim != self.ndim + 1 or pairs.shape[-1] != 2:
            self.fail('invalid', ndim=self.ndim)
        if not np.all(np.isfinite(pairs)):
            self.fail('not_finite')
        # filled part by part so every double is kept exactly
        values = np.empty(pairs.shape[:-1], dtype=complex)
        values.real = pairs[..., 0]
        values.imag = pairs[..., 1]
        return values


class ErrorBasisSerializer(serializers.Serializer):
    """
    Serializer for an orthogonal unitary basis: d, the operator matrices and
    one label per operator (labels default to 0..n-1)
    """
    d = serializers.IntegerField(min_value=2)
    ops = ComplexArrayField(ndim=3)
    labels = serializers.ListField(child=serializers.JSONField(), required=False)

    def create(self, validated_data):
        ops = validated_data['ops']
        labels = validated_data.get('labels') or list(range(ops.shape[0]))
        return ErrorBasis(d=validated_data['d'], ops=ops, labels=tuple(labels))


class BasisReferenceField(serializers.Field):
    """Either the string "wh" or an inline error basis"""
    default_error_messages = {
        'invalid': 'Expected "wh" or an inline error basis object.',
    }

    def to_representation(self, value):
        if isinstance(value, ErrorBasis):
            return ErrorBasisSerializer(value).data
        return 'wh'

    def to_internal_value(self, data):
        if data == 'wh':
            return data
        if not isinstance(data, dict):
            self.fail('invalid')
        serializer = ErrorBasisSerializer(data=data)
        if not serializer.is_valid():
            raise serializers.ValidationError(serializer.errors)
        return serializer.save()


class ProvenanceSerializer(serializers.Serializer):
    method = serializers.ChoiceField(choices=['analytic', 'search'])
    seed = serializers.IntegerField(allow_null=True, required=False, min_value=0)
    objective = serializers.FloatField(allow_null=True, required=False)
    sic_deviation = serializers.FloatField(allow_null=True, required=False)
    timestamp = serializers.DateTimeField(allow_null=True, required=False)


class FiducialFileSerializer(serializers.Serializer):
    """
    Serializer for fiducial files
    """
    format_version = serializers.IntegerField()
    d = serializers.IntegerField(min_value=2)
    amplitudes = ComplexArrayField(ndim=1)
    basis = BasisReferenceField()
    provenance = ProvenanceSerializer()

    def validate_format_version(self, value):
        from .files import FORMAT_VERSION

        if value != FORMAT_VERSION:
            raise serializers.ValidationError(f"Unsupported format version {value}.")
        return value

    def validate(self, attrs):
        d = attrs['d']
        if attrs['amplitudes'].shape != (d,):
            raise serializers.ValidationError({
                'amplitudes': f"Expected {d} amplitudes, got {attrs['amplitudes'].shape[0]}."
            })
        basis = attrs['basis']
        if isinstance(basis, ErrorBasis) and basis.d != d:
            raise serializers.ValidationError({
                'basis': f"Basis dimension {basis.d} does not match d={d}."
            })
        return attrs

    def create(self, validated_data):
        from .files import FiducialFile, Provenance
        from .wh_group import require_valid_basis

        basis = validated_data['basis']
        if isinstance(basis, ErrorBasis):
            basis = require_valid_basis(basis)
        return FiducialFile(
            d=validated_data['d'],
            amplitudes=validated_data['amplitudes'],
            basis=basis,
            provenance=Provenance(**validated_data['provenance']),
            format_version=validated_data['format_version'],
        )


class FiducialSerializer(serializers.Serializer):
    d = serializers.IntegerField()
    amplitudes = ComplexArrayField(ndim=1)


class DesignCertificateSerializer(serializers.Serializer):
    t = serializers.IntegerField()
    n = serializers.IntegerField()
    d = serializers.IntegerField()
    potential = serializers.FloatField()
    threshold = serializers.FloatField()
    deviation = serializers.FloatField()
    passed = serializers.BooleanField()
    tol = serializers.FloatField()
    max_overlap_error = serializers.FloatField(allow_null=True)
    flags = serializers.ListField(child=serializers.CharField())


class CompletenessReportSerializer(serializers.Serializer):
    rank = serializers.IntegerField()
    gram_eigenvalues = serializers.ListField(child=serializers.FloatField())
    informationally_complete = serializers.BooleanField()
    tol = serializers.FloatField()


class BasisReportSerializer(serializers.Serializer):
    d = serializers.IntegerField()
    n = serializers.IntegerField()
    unitarity_deviation = serializers.FloatField()
    orthogonality_deviation = serializers.FloatField()
    identity_count = serializers.IntegerField()
    tol = serializers.FloatField()
    passed = serializers.BooleanField()


class VerificationReportSerializer(serializers.Serializer):
    d = serializers.IntegerField()
    passed = serializers.BooleanField()
    designs = DesignCertificateSerializer(many=True)
    sic = DesignCertificateSerializer()
    completeness = CompletenessReportSerializer()
    one_design_deviation = serializers.FloatField()


class RestartRecordSerializer(serializers.Serializer):
    """
    One JSON line per finished restart
    """
    restart = serializers.IntegerField(source='restart_index')
    seed = serializers.IntegerField()
    objective = serializers.FloatField()
    sic_deviation = serializers.FloatField()
    iterations = serializers.IntegerField()
    converged = serializers.BooleanField()


class SearchResultSerializer(RestartRecordSerializer):
    d = serializers.IntegerField(source='fiducial.d')
    amplitudes = ComplexArrayField(source='fiducial.amplitudes')
    global_min = serializers.FloatField()
    gap = serializers.FloatField()
    status = serializers.CharField()
    polish_evaluations = serializers.IntegerField()


class CensusSerializer(serializers.Serializer):
    """
    Serializer for census results, all representatives inline
    """
    d = serializers.IntegerField()
    runs = serializers.IntegerField()
    seed = serializers.IntegerField()
    count = serializers.IntegerField()
    restarts_per_run = serializers.IntegerField()
    converged_runs = serializers.IntegerField()
    continuum_suspected = serializers.BooleanField()
    low_confidence = serializers.BooleanField()
    dedup_tol = serializers.FloatField()
    min_separation = serializers.FloatField(allow_null=True)
    new_solution_curve = serializers.ListField(
        child=serializers.ListField(child=serializers.IntegerField())
    )
    representatives = FiducialSerializer(many=True)


class StoredFiducialSerializer(serializers.ModelSerializer):
    """
    Serializer for StoredFiducial model
    """
    census = serializers.PrimaryKeyRelatedField(source='id_census', read_only=True)

    class Meta:
        model = StoredFiducial
        fields = [
            'id_fiducial', 'dimension', 'amplitudes', 'basis', 'method', 'seed',
            'objective', 'sic_deviation', 'converged', 'census', 'created_at'
        ]
        read_only_fields = fields


class CensusRecordSerializer(serializers.ModelSerializer):
    """
    Serializer for CensusRecord model
    """
    representative_count = serializers.SerializerMethodField()

    class Meta:
        model = CensusRecord
        fields = [
            'id_census', 'dimension', 'runs', 'seed', 'restarts_per_run', 'count',
            'continuum_suspected', 'low_confidence', 'converged_runs', 'min_separation',
            'new_solution_curve', 'representative_count', 'created_at'
        ]
        read_only_fields = fields

    def get_representative_count(self, obj):
        return obj.fiducials.count()


class CertificateQuerySerializer(serializers.Serializer):
    """
    Options shared by every certificate request
    """
    t = serializers.IntegerField(required=False, min_value=1, max_value=8)
    tol = serializers.FloatField(required=False)

    def validate_tol(self, value):
        if not value > 0:
            raise serializers.ValidationError("Tolerance must be positive.")
        return value


class VerifyRequestSerializer(CertificateQuerySerializer):
    """
    Serializer for the verify endpoint: a fiducial file plus options
    """
    file = serializers.JSONField(help_text="Fiducial file contents")
