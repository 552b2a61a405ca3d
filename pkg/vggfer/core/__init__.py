from .features import FeatureMatrix
from .eigen import symmetric_eigh, jacobi_eigh
from .pca import PcaModel, pca_fit, pca_transform, reconstruct
from .svm import SvmModel, BinarySvm, svm_train_binary, svm_train_ovr, svm_decision, svm_predict
