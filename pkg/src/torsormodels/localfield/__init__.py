from .field import FieldElement, FieldSpec
from .series import DEFAULT_PRECISION, LaurentSeries, parse_series

__all__ = ["FieldElement", "FieldSpec", "LaurentSeries", "parse_series", "DEFAULT_PRECISION"]
