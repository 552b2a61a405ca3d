from .ops import conv2d, maxpool2d, dense, relu, flatten
