"""Pluggable mask decoders: file on disk -> MaskGrid.

Decoders are registered by file suffix so new formats can be added without
touching the data-prep code, which only ever sees MaskGrid.
"""

from __future__ import annotations

from pathlib import Path
from typing import Callable

import numpy as np
from PIL import Image

from .data_prep import MaskGrid
from .errors import InputError

Decoder = Callable[[Path], MaskGrid]

_DECODERS: dict[str, Decoder] = {}


def register_decoder(suffix: str, decoder: Decoder) -> None:
    _DECODERS[suffix.lower()] = decoder


def decode_mask(path: str | Path) -> MaskGrid:
    """Decode a mask file; any nonzero pixel is foreground."""
    path = Path(path)
    decoder = _DECODERS.get(path.suffix.lower())
    if decoder is None:
        raise InputError(f"no mask decoder registered for {path.suffix!r}")
    return decoder(path)


def _decode_png(path: Path) -> MaskGrid:
    with Image.open(path) as img:
        arr = np.asarray(img.convert("L"))
    return MaskGrid.from_array(arr > 0)


def _decode_npy(path: Path) -> MaskGrid:
    arr = np.load(path)
    return MaskGrid.from_array(np.asarray(arr) != 0)


register_decoder(".png", _decode_png)
register_decoder(".npy", _decode_npy)
