from .preprocess import ImageSample, preprocess, preprocess_batch, resize_intensities, preprocess_digest, DEFAULT_MEANS
from .corpus import Corpus, load_corpus, load_images, content_hash
from .cache import FeatureCache, FeatureSet, extract_features
from .synthetic import generate_synthetic_corpus
