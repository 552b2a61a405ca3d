from .kernels import oracle_conv2d, oracle_maxpool2d, oracle_dense, oracle_relu
from .resize import oracle_resize_bilinear
from .pca import OraclePca, oracle_pca
from .svm import OracleSvm, oracle_svm_dual, oracle_decision_values, oracle_predict
