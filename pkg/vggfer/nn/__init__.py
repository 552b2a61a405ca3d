from .layers import TapConv2d, TapMaxPool2d, TapDense
from .vgg import (
    VggSpec, VGG19, WeightBundle, cfgs, load_bundle, save_bundle, forward_with_taps, make_micro_bundle,
    FULL_SPEC, MICRO_SPEC)
