"""Point-process layer: samplers, partition machinery, process-level bounds."""

from ..coupling import sample_mdep_array, sample_mdep_counts
from .dpi import (
    CountLawFromMeasure,
    DiracCountLaw,
    DpiEstimate,
    PoissonCountLaw,
    PrefixTerm,
    dpi_lower_bound,
    tuple_process_bound,
)
from .gibbs import (
    GibbsModel,
    GnzReport,
    IndicatorTimesEmpty,
    PapangelouBound,
    TotalCount,
    gnz_check,
    papangelou_bound,
    sample_gibbs,
)
from .patterns import (
    Box,
    IntensityMeasure,
    LabelSet,
    LabelSpace,
    PartitionSpec,
    PointPattern,
    count_vector,
    sample_poisson_process,
)
from .ustat import (
    IntervalPairModel,
    MonotoneMapModel,
    RResult,
    TripletSumModel,
    UStatModel,
    build_ustat_process,
    sample_xA,
    ustat_R,
    ustat_bound,
)

__all__ = [
    "Box",
    "CountLawFromMeasure",
    "DiracCountLaw",
    "DpiEstimate",
    "GibbsModel",
    "GnzReport",
    "IndicatorTimesEmpty",
    "IntensityMeasure",
    "IntervalPairModel",
    "LabelSet",
    "LabelSpace",
    "MonotoneMapModel",
    "PapangelouBound",
    "PartitionSpec",
    "PoissonCountLaw",
    "PointPattern",
    "PrefixTerm",
    "RResult",
    "TotalCount",
    "TripletSumModel",
    "UStatModel",
    "build_ustat_process",
    "count_vector",
    "dpi_lower_bound",
    "gnz_check",
    "papangelou_bound",
    "sample_gibbs",
    "sample_mdep_array",
    "sample_mdep_counts",
    "sample_poisson_process",
    "sample_xA",
    "tuple_process_bound",
    "ustat_R",
    "ustat_bound",
]
