# BSD 3-Clause License
# Copyright (c) 2021, the vggfer authors

import os

import numpy as np
import pytest

from vggfer.data import generate_synthetic_corpus, load_corpus, load_images
from vggfer.data.synthetic import synthetic_image
from vggfer.enum import EXPRESSIONS
from vggfer.exceptions import (
    CorpusError, EmptyCorpusError, ImageDecodeError, SkippedImageWarning, UnknownLabelError)
from vggfer.io.image import encode_pgm


def write_image(root, label, name, value=0, size=(8, 8)):
    os.makedirs(os.path.join(root, label), exist_ok=True)
    return encode_pgm(os.path.join(root, label, name), np.full(size, value, dtype=np.uint8))


class TestSyntheticCorpus:

    def test_counts(self, synthetic_root):
        corpus = load_corpus(synthetic_root)
        assert len(corpus) == 210
        assert list(corpus.class_counts) == list(EXPRESSIONS)
        assert set(corpus.class_counts.values()) == {30}
        assert corpus.samples[0].source_size == (256, 256)

    def test_byte_order_and_ids(self, synthetic_root):
        corpus = load_corpus(synthetic_root)
        assert corpus.ids[0] == 'anger/anger_000'
        assert corpus.ids[-1] == 'surprise/surprise_029'
        assert corpus.ids == sorted(corpus.ids, key=os.fsencode)

    def test_hash_is_stable(self, synthetic_root):
        assert load_corpus(synthetic_root).content_hash == load_corpus(synthetic_root).content_hash

    def test_regeneration_is_byte_identical(self, synthetic_root, tmpdir):
        again = generate_synthetic_corpus(str(tmpdir), seed=42, per_class=30)
        assert again.content_hash == load_corpus(synthetic_root).content_hash

    def test_seed_changes_pixels(self, tmpdir):
        a = generate_synthetic_corpus(str(tmpdir.mkdir('a')), seed=1, per_class=2, size=(32, 32))
        b = generate_synthetic_corpus(str(tmpdir.mkdir('b')), seed=2, per_class=2, size=(32, 32))
        assert a.content_hash != b.content_hash

    def test_classes_differ_more_than_samples(self):
        rng = np.random.default_rng(0)
        first = [synthetic_image(0, rng, (64, 64)).astype(np.float64) for _ in range(2)]
        other = synthetic_image(3, rng, (64, 64)).astype(np.float64)
        within = np.abs(first[0] - first[1]).mean()
        between = np.abs(first[0] - other).mean()
        assert between > within


class TestLoadCorpus:

    def test_hash_sees_pixels(self, tmpdir):
        root = str(tmpdir)
        path = write_image(root, 'happy', 'a.pgm', value=10)
        before = load_corpus(root).content_hash
        encode_pgm(path, np.full((8, 8), 11, dtype=np.uint8))
        assert load_corpus(root).content_hash != before

    def test_ignores_hidden_and_other_files(self, tmpdir):
        root = str(tmpdir)
        write_image(root, 'sad', 'a.pgm')
        tmpdir.join('README.txt').write('x')
        tmpdir.join('sad', 'notes.txt').write('x')
        tmpdir.mkdir('.cache')
        assert load_corpus(root).ids == ['sad/a']

    def test_unknown_label(self, tmpdir):
        write_image(str(tmpdir), 'contempt', 'a.pgm')
        with pytest.raises(UnknownLabelError, match='anger, disgust'):
            load_corpus(str(tmpdir))

    def test_empty(self, tmpdir):
        tmpdir.mkdir('happy')
        with pytest.raises(EmptyCorpusError):
            load_corpus(str(tmpdir))

    def test_missing_root(self, tmpdir):
        with pytest.raises(CorpusError, match='missing'):
            load_corpus(str(tmpdir.join('missing')))

    def test_duplicate_stem(self, tmpdir):
        root = str(tmpdir)
        write_image(root, 'fear', 'a.pgm')
        write_image(root, 'fear', 'a.png')
        with pytest.raises(CorpusError, match='fear/a'):
            load_corpus(root)

    def test_corrupt_image_aborts(self, tmpdir):
        write_image(str(tmpdir), 'fear', 'a.pgm')
        tmpdir.join('fear', 'b.pgm').write('garbage')
        with pytest.raises(ImageDecodeError, match='b.pgm'):
            load_corpus(str(tmpdir))

    def test_corrupt_image_skipped(self, tmpdir):
        write_image(str(tmpdir), 'fear', 'a.pgm')
        tmpdir.join('fear', 'b.pgm').write('garbage')
        with pytest.warns(SkippedImageWarning):
            corpus = load_corpus(str(tmpdir), on_error='skip')
        assert corpus.ids == ['fear/a']

    def test_load_images(self, tmpdir):
        path = write_image(str(tmpdir), 'happy', 'face.pgm', value=7)
        samples = load_images([path])
        assert samples[0].id == 'face'
        assert samples[0].label is None
        assert int(samples[0].pixels[0, 0]) == 7

    def test_load_images_missing(self, tmpdir):
        with pytest.raises(CorpusError):
            load_images([str(tmpdir.join('none.pgm'))])


def test_synthetic_rejects_empty_classes(tmpdir):
    with pytest.raises(ValueError):
        generate_synthetic_corpus(str(tmpdir), per_class=0)
