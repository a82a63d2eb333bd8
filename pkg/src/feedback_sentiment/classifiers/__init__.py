"""Classical BoW classifiers: Naive Bayes, logistic regression, KNN, SVM, RF."""
from .base import MODEL_FORMAT_VERSION, ClassifierError, DivergenceError
from .forest import DecisionTree, RFConfig, RFModel, fit_tree, rf_fit, rf_predict
from .knn import KNNModel, knn_fit, knn_predict
from .logistic import LRConfig, LRModel, lr_fit, lr_loss_and_grad
from .naive_bayes import NBModel, nb_fit
from .svm import SVMConfig, SVMModel, svm_fit, svm_objective

MODEL_TYPES = {
    "nb": NBModel,
    "lr": LRModel,
    "knn": KNNModel,
    "svm": SVMModel,
    "rf": RFModel,
}


def nb_predict_score(model: NBModel, x) -> float:
    return model.predict_score(x)


def model_to_dict(model) -> dict:
    return {"model_type": model.model_type, "version": MODEL_FORMAT_VERSION,
            "params": model.to_params()}


def model_from_dict(doc: dict):
    kind = doc.get("model_type")
    if kind not in MODEL_TYPES:
        raise ClassifierError(f"unknown model_type {kind!r}")
    if doc.get("version") != MODEL_FORMAT_VERSION:
        raise ClassifierError(f"unsupported model version {doc.get('version')!r}")
    return MODEL_TYPES[kind].from_params(doc["params"])


__all__ = [
    "ClassifierError", "DivergenceError", "MODEL_TYPES", "MODEL_FORMAT_VERSION",
    "NBModel", "nb_fit", "nb_predict_score",
    "LRConfig", "LRModel", "lr_fit", "lr_loss_and_grad",
    "KNNModel", "knn_fit", "knn_predict",
    "SVMConfig", "SVMModel", "svm_fit", "svm_objective",
    "RFConfig", "RFModel", "DecisionTree", "fit_tree", "rf_fit", "rf_predict",
    "model_to_dict", "model_from_dict",
]
