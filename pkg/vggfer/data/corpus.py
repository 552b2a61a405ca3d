# BSD 3-Clause License
# Copyright (c) 2021, the vggfer authors

"""Directory-per-class expression corpora.

Layout is ``<root>/<label>/<image>`` with ``<label>`` one of the seven canonical expression names.
Sample ids are ``<label>/<file stem>``, so equal file names under different labels never collide.
"""

import hashlib
import json
import os
import warnings
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Union

from vggfer.enum import EXPRESSIONS, OnError
from vggfer.exceptions import (
    CorpusError, EmptyCorpusError, ImageDecodeError, SkippedImageWarning, UnknownLabelError)
from vggfer.io.image import decode_image, is_image_file
from .preprocess import ImageSample

__all__ = ['Corpus', 'load_corpus', 'load_images', 'content_hash']


def _byte_order(names: Iterable[str]) -> List[str]:
    return sorted(names, key=os.fsencode)


def content_hash(samples: Iterable[ImageSample]) -> str:
    """SHA-256 over ids, labels, grid sizes and pixels; file containers and timestamps do not enter it."""
    h = hashlib.sha256()
    for s in samples:
        header = json.dumps([s.id, s.label, list(s.source_size)])
        h.update(header.encode('utf-8'))
        h.update(s.pixels.tobytes(order='C'))
    return h.hexdigest()


@dataclass
class Corpus:
    root: str
    samples: List[ImageSample]
    class_counts: Dict[str, int] = field(default_factory=OrderedDict)
    _hash: Optional[str] = field(default=None, repr=False, compare=False)

    def __len__(self):
        return len(self.samples)

    @property
    def ids(self) -> List[str]:
        return [s.id for s in self.samples]

    @property
    def labels(self) -> List[str]:
        return [s.label for s in self.samples]

    @property
    def content_hash(self) -> str:
        if self._hash is None:
            self._hash = content_hash(self.samples)
        return self._hash


def load_corpus(root: str, on_error: Union[OnError, str] = OnError.ABORT) -> Corpus:
    """Read every image under ``root`` in (label, file name) byte order.

    Parameters
    ----------
    root : str
        Corpus directory
    on_error : OnError or str
        ``abort`` raises on the first undecodable image, ``skip`` warns and leaves it out

    Returns
    -------
    Corpus
    """
    on_error = OnError.parse(on_error) if isinstance(on_error, str) else on_error
    if not os.path.isdir(root):
        raise CorpusError("Corpus root {} is not a directory".format(root))
    samples = []
    class_counts = OrderedDict()
    for label in _byte_order(os.listdir(root)):
        label_dir = os.path.join(root, label)
        if label.startswith('.') or not os.path.isdir(label_dir):
            continue
        if label not in EXPRESSIONS:
            raise UnknownLabelError(
                "Unknown label directory {!r} in {}; valid labels are {}".format(label, root, ', '.join(EXPRESSIONS)))
        seen = set()
        for file_name in _byte_order(os.listdir(label_dir)):
            path = os.path.join(label_dir, file_name)
            if not os.path.isfile(path) or not is_image_file(file_name):
                continue
            sample_id = '{}/{}'.format(label, os.path.splitext(file_name)[0])
            if sample_id in seen:
                raise CorpusError("Duplicate sample id {} from {}".format(sample_id, path))
            try:
                pixels = decode_image(path)
            except ImageDecodeError as e:
                if on_error == OnError.ABORT:
                    raise
                warnings.warn(str(e), SkippedImageWarning)
                continue
            seen.add(sample_id)
            samples.append(ImageSample(id=sample_id, pixels=pixels, label=label))
            class_counts[label] = class_counts.get(label, 0) + 1
    if not samples:
        raise EmptyCorpusError("Corpus root {} holds no readable images".format(root))
    return Corpus(root=root, samples=samples, class_counts=class_counts)


def load_images(paths: Iterable[str]) -> List[ImageSample]:
    """Unlabelled samples for inference, id'd by file stem."""
    samples = []
    for path in paths:
        if not os.path.isfile(path):
            raise CorpusError("Image {} does not exist".format(path))
        stem = os.path.splitext(os.path.basename(path))[0]
        samples.append(ImageSample(id=stem, pixels=decode_image(path)))
    return samples
