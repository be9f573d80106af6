import numpy as np
import pytest

from robuststego.corpus import ENV_VAR, corpus_size, load_corpus
from robuststego.io import write_pgm


def test_desk_corpus():
    assert corpus_size() == 84
    images = load_corpus(None)
    assert len(images) == 84
    for _, img in images:
        assert img.shape == (256, 256) and img.dtype == np.uint8 and img.std() >= 12


def test_selection_is_seeded():
    a, b, c = load_corpus(10, seed=1), load_corpus(10, seed=1), load_corpus(10, seed=2)
    assert [i for i, _ in a] == [i for i, _ in b]
    assert [i for i, _ in a] != [i for i, _ in c]
    assert len({i for i, _ in a}) == 10


def test_invalid_size():
    with pytest.raises(ValueError):
        load_corpus(0)


def test_directory_override(tmp_path, monkeypatch):
    from PIL import Image

    rng = np.random.default_rng(0)
    imgs = {f"im{k}": rng.integers(0, 256, (24, 40), dtype=np.uint8) for k in range(3)}
    (tmp_path / "im0.pgm").write_bytes(write_pgm(imgs["im0"]))
    Image.fromarray(imgs["im1"]).save(tmp_path / "im1.png")
    Image.fromarray(imgs["im2"]).save(tmp_path / "im2.bmp")
    (tmp_path / "notes.txt").write_text("ignored")
    got = dict(load_corpus(None, path=tmp_path))
    assert sorted(got) == sorted(imgs)
    for k, v in imgs.items():
        assert np.array_equal(got[k], v)
    monkeypatch.setenv(ENV_VAR, str(tmp_path))
    assert corpus_size() == 3 and len(load_corpus(2)) == 2


def test_empty_directory(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_corpus(path=tmp_path)
