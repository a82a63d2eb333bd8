"""Small trainable transformer-encoder sentence classifier."""
from .model import (CLS_ID, PAD_ID, UNK_ID, TransformerConfig, TransformerError, attention_maps,
                    cross_entropy, decay_masks, forward, gelu, init_params, layer_norm,
                    loss_and_grads, param_shapes, zero_head)
from .optim import AdamWState, adamw_step
from .tokenizer import EncoderTokenizer, batch_length, encode_batch
from .training import (TrainConfig, TrainingDiverged, TrainLog, TransformerClassifier, evaluate,
                       load_weights, predict_proba, save_weights, train)

__all__ = [
    "CLS_ID", "PAD_ID", "UNK_ID", "TransformerConfig", "TransformerError", "attention_maps",
    "cross_entropy", "decay_masks", "forward", "gelu", "init_params", "layer_norm",
    "loss_and_grads", "param_shapes", "zero_head", "AdamWState", "adamw_step",
    "EncoderTokenizer", "batch_length", "encode_batch", "TrainConfig", "TrainingDiverged",
    "TrainLog", "TransformerClassifier", "evaluate", "load_weights", "predict_proba",
    "save_weights", "train",
]
