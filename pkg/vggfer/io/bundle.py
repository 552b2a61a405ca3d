# BSD 3-Clause License
# Copyright (c) 2021, the vggfer authors

"""Portable named-tensor bundle.

A bundle is a directory holding ``manifest.json`` and raw blob files::

    {"version": 1,
     "source": "...",
     "tensors": [{"name": "fc1.weight", "shape": [4096, 25088], "file": "data.bin", "offset_bytes": 0}, ...]}

Blobs are little-endian IEEE-754 float32 in row-major order. An optional ``sidecar.json`` carries
non-tensor metadata (class lists, hyperparameters, hashes).
"""

import hashlib
import json
import os
import shutil
import tempfile
from collections import OrderedDict
from typing import Any, Dict, Mapping, Optional, Tuple

import numpy as np
import torch

from vggfer.exceptions import (
    BundleError, MissingManifestError, TruncatedBlobError, UnsupportedVersionError)

MANIFEST_NAME = 'manifest.json'
SIDECAR_NAME = 'sidecar.json'
BLOB_NAME = 'data.bin'
FORMAT_VERSION = 1
BLOB_DTYPE = np.dtype('<f4')


def _to_numpy(t) -> np.ndarray:
    if isinstance(t, torch.Tensor):
        t = t.detach().cpu().numpy()
    return np.ascontiguousarray(np.asarray(t, dtype=BLOB_DTYPE))


def dump_json(obj, path):
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(obj, f, indent=2, sort_keys=True)
        f.write('\n')


def read_manifest(path: str) -> Dict[str, Any]:
    manifest_path = os.path.join(path, MANIFEST_NAME)
    if not os.path.isfile(manifest_path):
        raise MissingManifestError("No {} found in bundle path {}".format(MANIFEST_NAME, path))
    try:
        with open(manifest_path, 'r', encoding='utf-8') as f:
            manifest = json.load(f)
    except (ValueError, UnicodeDecodeError) as e:
        raise BundleError("Malformed manifest {}: {}".format(manifest_path, e))
    if not isinstance(manifest, dict) or 'version' not in manifest or 'tensors' not in manifest:
        raise BundleError("Manifest {} must be an object with 'version' and 'tensors'".format(manifest_path))
    if manifest['version'] != FORMAT_VERSION:
        raise UnsupportedVersionError(
            "Bundle {} has format version {}, only version {} is supported".format(
                path, manifest['version'], FORMAT_VERSION))
    return manifest


def read_bundle(path: str) -> Tuple['OrderedDict[str, torch.Tensor]', Dict[str, Any], Optional[Dict[str, Any]]]:
    """Load every tensor listed in a bundle manifest.

    Returns
    -------
    tuple
        (entries in manifest order, manifest metadata without the tensor list, sidecar or None)
    """
    manifest = read_manifest(path)
    entries = OrderedDict()
    for spec in manifest['tensors']:
        try:
            name, shape, file_name, offset = spec['name'], spec['shape'], spec['file'], spec['offset_bytes']
        except (KeyError, TypeError):
            raise BundleError("Malformed tensor record {!r} in {}".format(spec, path))
        if any(int(d) < 1 for d in shape):
            raise BundleError("Tensor {} in {} has non-positive extent {}".format(name, path, shape))
        blob_path = os.path.join(path, file_name)
        if not os.path.isfile(blob_path):
            raise TruncatedBlobError("Blob file {} of tensor {} is missing".format(blob_path, name))
        count = int(np.prod(shape))
        needed = int(offset) + count * BLOB_DTYPE.itemsize
        available = os.path.getsize(blob_path)
        if available < needed:
            raise TruncatedBlobError(
                "Tensor {} needs bytes [{}, {}) of {} but the file holds {} bytes".format(
                    name, offset, needed, blob_path, available))
        array = np.fromfile(blob_path, dtype=BLOB_DTYPE, count=count, offset=int(offset))
        entries[name] = torch.from_numpy(array.astype(np.float32).reshape([int(d) for d in shape]))
    metadata = {k: v for k, v in manifest.items() if k != 'tensors'}
    sidecar = None
    sidecar_path = os.path.join(path, SIDECAR_NAME)
    if os.path.isfile(sidecar_path):
        with open(sidecar_path, 'r', encoding='utf-8') as f:
            sidecar = json.load(f)
    return entries, metadata, sidecar


def write_bundle(
        path: str,
        entries: Mapping[str, Any],
        source: str = '',
        sidecar: Optional[Dict[str, Any]] = None) -> str:
    """Write tensors into a bundle directory, atomically replacing any previous one."""
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)
    tmp_dir = tempfile.mkdtemp(prefix='.tmp-', dir=parent)
    try:
        records = []
        offset = 0
        with open(os.path.join(tmp_dir, BLOB_NAME), 'wb') as blob:
            for name, tensor in entries.items():
                array = _to_numpy(tensor)
                blob.write(array.tobytes(order='C'))
                records.append({
                    'name': name,
                    'shape': [int(d) for d in array.shape],
                    'file': BLOB_NAME,
                    'offset_bytes': offset})
                offset += array.nbytes
        dump_json({'version': FORMAT_VERSION, 'source': source, 'tensors': records},
                  os.path.join(tmp_dir, MANIFEST_NAME))
        if sidecar is not None:
            dump_json(sidecar, os.path.join(tmp_dir, SIDECAR_NAME))
        # the previous bundle is moved aside, not deleted, until the new one is in place
        old_dir = None
        if os.path.isdir(path):
            old_dir = os.path.join(parent, '.old-' + os.path.basename(tmp_dir))
            os.replace(path, old_dir)
        try:
            os.replace(tmp_dir, path)
        except BaseException:
            if old_dir is not None:
                os.replace(old_dir, path)
            raise
        if old_dir is not None:
            shutil.rmtree(old_dir, ignore_errors=True)
    except BaseException:
        shutil.rmtree(tmp_dir, ignore_errors=True)
        raise
    return path


def tensor_digest(entries: Mapping[str, Any]) -> str:
    """SHA-256 over tensor names, shapes and float32 little-endian contents, independent of file layout."""
    h = hashlib.sha256()
    for name in sorted(entries):
        array = _to_numpy(entries[name])
        h.update(name.encode('utf-8'))
        h.update(json.dumps([int(d) for d in array.shape]).encode('ascii'))
        h.update(array.tobytes(order='C'))
    return h.hexdigest()


def file_digest(path: str, chunk_size: int = 1 << 20) -> str:
    h = hashlib.sha256()
    with open(path, 'rb') as f:
        for chunk in iter(lambda: f.read(chunk_size), b''):
            h.update(chunk)
    return h.hexdigest()
