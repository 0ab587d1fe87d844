from .bounds import (CLASSICALITY_RADIUS, CLASSICALITY_TIME, ELECTRON_OFFSET, GRAPHENE_AREAL_DENSITY,
                     classicality_bound, graphene_disk, macroscopicity, macroscopicity_forecast)
from .exclusion import ExclusionCurve, exclusion_scan, lambda_min_for, rate_profile
from .fitting import FitResult, FringeData, FringeFitter, chi_square
from .synthetic import synthetic_fringes
from .validity import ValidityReport, region_rT, region_ru, tau_C_limit, validity_report

__all__ = [
    "CLASSICALITY_RADIUS", "CLASSICALITY_TIME", "ELECTRON_OFFSET", "GRAPHENE_AREAL_DENSITY",
    "ExclusionCurve", "FitResult", "FringeData", "FringeFitter", "ValidityReport",
    "chi_square", "classicality_bound", "exclusion_scan", "graphene_disk", "lambda_min_for",
    "macroscopicity", "macroscopicity_forecast", "rate_profile", "region_rT", "region_ru",
    "synthetic_fringes", "tau_C_limit", "validity_report",
]
