from .gradcheck import MAX_CHECK_PARAMS, gradient_check
from .network import (
    ForecastModel,
    ModelConfig,
    PARAM_ORDER,
    flatten_params,
    forward,
    forward_batch,
    init_model,
    mse_loss_and_grads,
    unflatten_params,
)
from .training import Prediction, TrainingResult, pooled_rmse, predict_all, train

__all__ = [
    "ForecastModel",
    "ModelConfig",
    "MAX_CHECK_PARAMS",
    "PARAM_ORDER",
    "Prediction",
    "TrainingResult",
    "flatten_params",
    "forward",
    "forward_batch",
    "gradient_check",
    "init_model",
    "mse_loss_and_grads",
    "pooled_rmse",
    "predict_all",
    "train",
    "unflatten_params",
]
