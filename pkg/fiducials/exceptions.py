class SicPovmError(Exception):
    """Base error carrying a machine-readable code and structured details"""
    default_error_code = "SIC_POVM_ERROR"

    def __init__(self, message, error_code=None, details=None):
        self.message = message
        self.error_code = error_code or self.default_error_code
        self.details = details or {}
        super().__init__(self.message)

    def as_response(self):
        return {
            "message": self.message,
            "error_code": self.error_code,
            "details": self.details,
        }


class DomainError(SicPovmError, ValueError):
    """Dimension, parameter or dimension-mismatch errors"""
    default_error_code = "DOMAIN_ERROR"


class LabelIndexError(SicPovmError, IndexError):
    """Displacement label outside 0 <= j, k < d"""
    default_error_code = "INDEX_ERROR"


class StructuralError(SicPovmError, ValueError):
    """Wrong operator count or matrix shape"""
    default_error_code = "STRUCTURAL_ERROR"


class BasisParseError(SicPovmError, ValueError):
    """Basis JSON could not be decoded"""
    default_error_code = "BASIS_PARSE_ERROR"


class RejectedBasisError(SicPovmError):
    """Basis decoded but failed unitarity/orthogonality validation"""
    default_error_code = "BASIS_REJECTED"


class FiducialFileError(SicPovmError, ValueError):
    """Fiducial file could not be decoded or is not normalized"""
    default_error_code = "FIDUCIAL_FILE_ERROR"
