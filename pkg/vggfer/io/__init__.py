from .bundle import read_bundle, write_bundle, tensor_digest, file_digest, MANIFEST_NAME, FORMAT_VERSION
from .image import decode_image, encode_pgm, is_image_file, IMAGE_EXTENSIONS
