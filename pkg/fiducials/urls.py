from django.urls import path, include
from rest_framework.routers import DefaultRouter
from .views import StoredFiducialViewSet, CensusRecordViewSet, verify_view

# Create router and register viewsets
router = DefaultRouter()
router.register(r'fiducials', StoredFiducialViewSet)
router.register(r'census', CensusRecordViewSet)

urlpatterns = [
    path('verify/', verify_view, name='verify'),
    path('', include(router.urls)),
]
