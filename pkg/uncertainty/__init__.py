from .circular import circular_mean, circular_std
from .ensemble import EnsembleConfig, NormalFlowPrediction, RotationEnsemble, aggregate, ensemble_predict, \
    predict_with_uncertainty

__all__ = [
    'circular_mean', 'circular_std', 'EnsembleConfig', 'NormalFlowPrediction', 'RotationEnsemble', 'aggregate',
    'ensemble_predict', 'predict_with_uncertainty'
]
