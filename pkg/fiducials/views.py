from rest_framework import viewsets, mixins, status
from rest_framework.decorators import action, api_view, permission_classes
from rest_framework.response import Response
from rest_framework.permissions import AllowAny
from rest_framework.pagination import PageNumberPagination
from rest_framework.exceptions import ValidationError
from django_filters.rest_framework import DjangoFilterBackend
from rest_framework.filters import OrderingFilter
from drf_spectacular.utils import extend_schema, extend_schema_view, OpenApiParameter, OpenApiExample
from drf_spectacular.types import OpenApiTypes
from datetime import datetime
import logging

from .conf import sic_setting, tolerance_profile
from .exceptions import SicPovmError
from .files import load_fiducial_file, render_json
from .models import StoredFiducial, CensusRecord
from .serializers import (
    StoredFiducialSerializer, CensusRecordSerializer, CertificateQuerySerializer,
    VerificationReportSerializer, VerifyRequestSerializer,
)
from .permissions import IsStaffOrReadOnly
from .filters import StoredFiducialFilter, CensusRecordFilter
from .verification import verify_fiducial

logger = logging.getLogger(__name__)


class StandardResultsSetPagination(PageNumberPagination):
    """
    Custom pagination class for consistent pagination across the API
    """
    page_size = 20
    page_size_query_param = 'page_size'
    max_page_size = 100


def error_response(message, error_code, details=None, status_code=status.HTTP_400_BAD_REQUEST):
    return Response({
        "success": False,
        "message": message,
        "error_code": error_code,
        "details": details or {},
        "timestamp": datetime.now().isoformat()
    }, status=status_code)


def certificates_payload(fiducial_file, tol, t=None):
    report = verify_fiducial(
        fiducial_file.fiducial, fiducial_file.resolve_basis(),
        tol=tol, extra_t=t, rank_tol=sic_setting('GRAM_RANK_TOL'),
    )
    return VerificationReportSerializer(report).data


@extend_schema_view(
    list=extend_schema(
        summary="List Fiducials",
        description="""Paginated list of catalogued fiducial vectors.

**Filtering:**
- **dimension**: Hilbert space dimension d
- **method**: analytic or search
- **converged**: only certified search results
- **census**: fiducials found by one census
- **max_deviation**: upper bound on the SIC overlap error""",
    ),
    retrieve=extend_schema(summary="Get Fiducial", description="One catalogued fiducial with its provenance."),
    destroy=extend_schema(summary="Delete Fiducial", description="Remove a fiducial from the catalog (staff only)."),
)
class StoredFiducialViewSet(mixins.ListModelMixin,
                            mixins.RetrieveModelMixin,
                            mixins.DestroyModelMixin,
                            viewsets.GenericViewSet):
    """
    Catalogued fiducial vectors
    """
    queryset = StoredFiducial.objects.select_related('id_census').all()
    serializer_class = StoredFiducialSerializer
    permission_classes = [IsStaffOrReadOnly]
    pagination_class = StandardResultsSetPagination
    filter_backends = [DjangoFilterBackend, OrderingFilter]
    filterset_class = StoredFiducialFilter
    ordering_fields = ['created_at', 'dimension', 'sic_deviation']
    ordering = ['-created_at']

    @extend_schema(
        summary="Fiducial Certificates",
        description="Recompute the t=1, t=2 and SIC certificates of a stored fiducial's orbit.",
        parameters=[
            OpenApiParameter('t', OpenApiTypes.INT, description="Extra design order to certify"),
            OpenApiParameter('tol', OpenApiTypes.FLOAT, description="SIC overlap tolerance"),
        ],
        responses=VerificationReportSerializer,
    )
    @action(detail=True, methods=['get'])
    def certificates(self, request, pk=None):
        stored = self.get_object()
        query = CertificateQuerySerializer(data=request.query_params)
        try:
            query.is_valid(raise_exception=True)
            tol = query.validated_data.get('tol', tolerance_profile('numeric'))
            payload = certificates_payload(stored.to_fiducial_file(), tol, query.validated_data.get('t'))
        except ValidationError as e:
            logger.warning(f"Invalid certificate parameters for fiducial {pk}: {e.detail}")
            return error_response("Invalid query parameters.", "VALIDATION_ERROR", e.detail)
        except SicPovmError as e:
            logger.warning(f"Cannot certify fiducial {pk}: {e.message}")
            return error_response(e.message, e.error_code, e.details)
        except Exception as e:
            logger.error(f"Unexpected error certifying fiducial {pk}: {str(e)}", exc_info=True)
            return error_response(
                "An unexpected error occurred while computing certificates.",
                "UNEXPECTED_ERROR", {"error": str(e)}, status.HTTP_500_INTERNAL_SERVER_ERROR,
            )
        return Response({"success": True, "data": payload})


@extend_schema_view(
    list=extend_schema(summary="List Census Records", description="Census runs with their SIC counts."),
    retrieve=extend_schema(summary="Get Census Record", description="One census run."),
)
class CensusRecordViewSet(viewsets.ReadOnlyModelViewSet):
    """
    Stored census runs
    """
    queryset = CensusRecord.objects.prefetch_related('fiducials').all()
    serializer_class = CensusRecordSerializer
    pagination_class = StandardResultsSetPagination
    filter_backends = [DjangoFilterBackend, OrderingFilter]
    filterset_class = CensusRecordFilter
    ordering_fields = ['created_at', 'dimension', 'runs']
    ordering = ['-created_at']


@extend_schema(
    summary="Verify Fiducial File",
    description="""Certify an uploaded fiducial file without storing it.

Returns design certificates for t=1 and t=2 (plus an optional extra order),
the SIC overlap certificate and the informational-completeness report.
`data.passed` follows the SIC certificate.""",
    request=VerifyRequestSerializer,
    responses=VerificationReportSerializer,
    examples=[
        OpenApiExample(
            "Qubit fiducial",
            value={
                "file": {
                    "format_version": 1,
                    "d": 2,
                    "amplitudes": [[0.8880738339771153, 0.0], [0.3250575836718682, 0.3250575836718681]],
                    "basis": "wh",
                    "provenance": {"method": "analytic"}
                },
                "t": 3
            },
            request_only=True,
        ),
    ],
)
@api_view(['POST'])
@permission_classes([AllowAny])
def verify_view(request):
    """
    Certify a fiducial file posted in the request body
    """
    serializer = VerifyRequestSerializer(data=request.data)
    try:
        serializer.is_valid(raise_exception=True)
        fiducial_file = load_fiducial_file(render_json(serializer.validated_data['file']))
        tol = serializer.validated_data.get('tol', tolerance_profile('numeric'))
        payload = certificates_payload(fiducial_file, tol, serializer.validated_data.get('t'))
    except ValidationError as e:
        return error_response("Invalid verification request.", "VALIDATION_ERROR", e.detail)
    except SicPovmError as e:
        logger.warning(f"Rejected fiducial file: {e.message}")
        return error_response(e.message, e.error_code, e.details)
    except Exception as e:
        logger.error(f"Unexpected error verifying fiducial file: {str(e)}", exc_info=True)
        return error_response(
            "An unexpected error occurred while verifying the fiducial.",
            "UNEXPECTED_ERROR", {"error": str(e)}, status.HTTP_500_INTERNAL_SERVER_ERROR,
        )
    logger.info(f"Verified d={fiducial_file.d} fiducial: passed={payload['passed']}")
    return Response({"success": True, "data": payload})
