#!/usr/bin/env python3
"""Regenerate the desk-scale test corpus under tests/data/.

Every corpus image is a 384x512 or 512x384 crop of a scikit-image sample
picture, encoded by libjpeg (through Pillow) as baseline JPEG, quality 80,
4:2:0 chroma subsampling, standard Huffman tables, no restart markers.
The fixtures directory holds small hand-shaped files for unit tests.

The outputs are committed; rerunning this script is only needed when the
corpus definition changes.
"""

import pathlib

import numpy as np
import skimage.data as sd
from PIL import Image

ROOT = pathlib.Path(__file__).resolve().parent.parent / "tests" / "data"
CORPUS = ROOT / "corpus"
FIXTURES = ROOT / "fixtures"

BASELINE = dict(quality=80, subsampling=2, optimize=False, progressive=False)


def crop(img, top, left, h, w):
    out = img[top:top + h, left:left + w]
    assert out.shape[:2] == (h, w), (out.shape, top, left, h, w)
    return out


def resized(img, h, w):
    return np.asarray(Image.fromarray(img).resize((w, h), Image.LANCZOS))


def save(arr, path, **kw):
    opts = dict(BASELINE)
    opts.update(kw)
    Image.fromarray(np.ascontiguousarray(arr)).convert("RGB").save(path, "JPEG", **opts)


def corpus_images():
    astro = sd.astronaut()
    coffee = sd.coffee()
    rocket = sd.rocket()
    ihc = sd.immunohistochemistry()
    retina = sd.retina()
    hubble = sd.hubble_deep_field()
    moto_l, moto_r, _ = sd.stereo_motorcycle()
    chelsea = sd.chelsea()
    wheel = sd.colorwheel()

    yield "astronaut_top", crop(astro, 0, 0, 384, 512)
    yield "astronaut_left", crop(astro, 0, 64, 512, 384)
    yield "coffee", crop(coffee, 8, 44, 384, 512)
    yield "rocket_left", crop(rocket, 20, 0, 384, 512)
    yield "rocket_right", crop(rocket, 43, 128, 384, 512)
    yield "ihc_wide", crop(ihc, 64, 0, 384, 512)
    yield "ihc_tall", crop(ihc, 0, 128, 512, 384)
    yield "retina_full", resized(retina, 384, 512)
    yield "retina_disc", crop(retina, 500, 700, 384, 512)
    yield "retina_vessels", crop(retina, 200, 300, 512, 384)
    yield "retina_edge", crop(retina, 900, 100, 384, 512)
    yield "hubble_a", crop(hubble, 0, 0, 384, 512)
    yield "hubble_b", crop(hubble, 420, 450, 384, 512)
    yield "hubble_tall", crop(hubble, 300, 600, 512, 384)
    yield "moto_left", crop(moto_l, 60, 100, 384, 512)
    yield "moto_right", crop(moto_r, 100, 220, 384, 512)
    yield "moto_left_scaled", resized(moto_l, 384, 512)
    yield "chelsea_scaled", crop(resized(chelsea, 384, 577), 0, 32, 384, 512)
    yield "colorwheel_scaled", crop(resized(wheel, 512, 512), 0, 64, 512, 384)
    yield "coffee_scaled", resized(coffee, 384, 512)
    yield "astronaut_scaled", resized(astro, 512, 384)
    yield "rocket_scaled", resized(rocket, 384, 512)


def fixtures():
    rng = np.random.default_rng(459)
    chelsea = sd.chelsea()

    # One 16x16 MCU with texture.
    save(crop(chelsea, 120, 200, 16, 16), FIXTURES / "one_mcu.jpg")
    # Flat mid-gray: every quantized coefficient is zero.
    save(np.full((32, 32, 3), 128, np.uint8), FIXTURES / "flat_gray.jpg")
    # Six MCUs in one row.
    save(crop(chelsea, 100, 100, 16, 96), FIXTURES / "six_mcu.jpg")
    # Dimensions that are not multiples of the MCU size.
    save(chelsea, FIXTURES / "chelsea_odd.jpg")
    # 4:4:4 sampling.
    save(crop(chelsea, 0, 0, 64, 96), FIXTURES / "chelsea_444.jpg", subsampling=0)
    # Progressive and optimized-Huffman variants.
    save(crop(chelsea, 0, 0, 64, 64), FIXTURES / "progressive.jpg", progressive=True)
    save(crop(chelsea, 0, 0, 64, 96), FIXTURES / "optimized.jpg", optimize=True)
    # Uniform noise, full-range.
    save(rng.integers(0, 256, (64, 64, 3), dtype=np.uint8), FIXTURES / "noise.jpg")
    # libjpeg's own restart insertion, for comparison with restructuring.
    src = crop(sd.astronaut(), 0, 0, 384, 512)
    save(src, FIXTURES / "astronaut_top_ri0.jpg")
    save(src, FIXTURES / "astronaut_top_ri4.jpg", restart_marker_blocks=4)
    save(crop(chelsea, 100, 100, 16, 96), FIXTURES / "six_mcu_ri2.jpg", restart_marker_blocks=2)
    # Grayscale (single component) for the unsupported-sampling path.
    Image.fromarray(crop(sd.camera(), 0, 0, 32, 32)).save(FIXTURES / "gray.jpg", "JPEG", quality=80)


def main():
    CORPUS.mkdir(parents=True, exist_ok=True)
    FIXTURES.mkdir(parents=True, exist_ok=True)
    for name, img in corpus_images():
        save(img, CORPUS / f"{name}.jpg")
    fixtures()


if __name__ == "__main__":
    main()
