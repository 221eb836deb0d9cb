"""Dataset loading: delimited text files described by an INI registry.

The registry is a plain INI file with one section per dataset::

    [Haberman]
    file = haberman.data
    delimiter = ,
    header = no
    label_column = -1
    positive_label = 2
    negative_label = 1
    expected_n = 306
    expected_m = 3

``file`` is resolved against the data directory (by default the directory
holding the registry). ``delimiter`` may be a single character, ``tab`` or
``whitespace`` (runs of blanks). ``ignore_columns`` lists non-feature columns
such as record ids.
"""
from __future__ import annotations

import configparser
import csv
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import DataError


@dataclass(frozen=True)
class Dataset:
    name: str
    X: np.ndarray
    y: np.ndarray
    provenance: str = ""

    def __post_init__(self):
        X = np.array(self.X, dtype=float)
        y = np.array(self.y, dtype=int)
        if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
            raise DataError(f"{self.name}: X {X.shape} and y {y.shape} are inconsistent")
        if X.shape[0] < 2 or X.shape[1] < 1:
            raise DataError(f"{self.name}: need N >= 2 rows and m >= 1 features")
        if not np.all(np.isfinite(X)):
            raise DataError(f"{self.name}: features contain NaN or Inf")
        if not np.all(np.isin(y, (0, 1))) or len(np.unique(y)) != 2:
            raise DataError(f"{self.name}: labels must contain both classes 0 and 1")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def m(self) -> int:
        return self.X.shape[1]

    def replace_X(self, X) -> "Dataset":
        return Dataset(self.name, X, self.y, self.provenance)


@dataclass(frozen=True)
class RegistryEntry:
    name: str
    file: Path
    delimiter: str = ","
    has_header: bool = False
    label_column: int = -1
    positive_label: str = "1"
    negative_label: str = "0"
    expected_n: int | None = None
    expected_m: int | None = None
    ignore_columns: tuple = ()
    url: str = ""


def default_registry_path() -> Path:
    return Path(str(resources.files("varclass") / "data" / "registry.ini"))


def load_registry(path=None, data_dir=None) -> dict:
    """Parse a registry file into ``{name: RegistryEntry}`` preserving file order."""
    path = Path(path) if path is not None else default_registry_path()
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise DataError(f"cannot read registry {path}: {exc}") from exc
    base = Path(data_dir) if data_dir is not None else path.parent

    entries = {}
    for name in parser.sections():
        sec = parser[name]
        try:
            ignore = tuple(int(t) for t in sec.get("ignore_columns", "").replace(",", " ").split())
            entries[name] = RegistryEntry(
                name=name,
                file=base / sec["file"],
                delimiter=sec.get("delimiter", ","),
                has_header=sec.getboolean("header", False),
                label_column=sec.getint("label_column", -1),
                positive_label=sec.get("positive_label", "1"),
                negative_label=sec.get("negative_label", "0"),
                expected_n=sec.getint("expected_n") if "expected_n" in sec else None,
                expected_m=sec.getint("expected_m") if "expected_m" in sec else None,
                ignore_columns=ignore,
                url=sec.get("url", ""),
            )
        except (KeyError, ValueError) as exc:
            raise DataError(f"registry {path}, section [{name}]: {exc}") from exc
    return entries


def _split_rows(fh, delimiter: str):
    if delimiter == "whitespace":
        for line in fh:
            yield line.split()
        return
    if delimiter == "tab":
        delimiter = "\t"
    for row in csv.reader(fh, delimiter=delimiter):
        yield [t.strip() for t in row]


def _same_token(token: str, label: str) -> bool:
    if token == label:
        return True
    try:
        return float(token) == float(label)
    except ValueError:
        return False


def load_csv(entry: RegistryEntry) -> Dataset:
    """Read the file named by ``entry``, map labels to {0, 1} and check its shape."""
    try:
        fh = open(entry.file, encoding="utf-8", newline="")
    except OSError as exc:
        raise DataError(f"{entry.name}: cannot open {entry.file}: {exc}") from exc

    rows, labels = [], []
    with fh:
        width = None
        for lineno, tokens in enumerate(_split_rows(fh, entry.delimiter), start=1):
            if not tokens or all(t == "" for t in tokens):
                continue
            if entry.has_header and width is None and not rows:
                width = len(tokens)
                continue
            if width is None:
                width = len(tokens)
            elif len(tokens) != width:
                raise DataError(
                    f"{entry.file}:{lineno}: expected {width} fields, found {len(tokens)}"
                )
            label_col = entry.label_column % width
            skip = {label_col, *(c % width for c in entry.ignore_columns)}
            label = tokens[label_col]
            if _same_token(label, entry.positive_label):
                labels.append(1)
            elif _same_token(label, entry.negative_label):
                labels.append(0)
            else:
                raise DataError(
                    f"{entry.file}:{lineno}, column {label_col + 1}: unknown label {label!r}"
                )
            feats = []
            for col, tok in enumerate(tokens):
                if col in skip:
                    continue
                try:
                    feats.append(float(tok))
                except ValueError:
                    raise DataError(
                        f"{entry.file}:{lineno}, column {col + 1}: cannot parse {tok!r} as a number"
                    ) from None
            rows.append(feats)

    n = len(rows)
    m = len(rows[0]) if rows else 0
    if entry.expected_n is not None and n != entry.expected_n:
        raise DataError(f"{entry.name}: expected {entry.expected_n} rows, found {n}")
    if entry.expected_m is not None and m != entry.expected_m:
        raise DataError(f"{entry.name}: expected {entry.expected_m} features, found {m}")
    return Dataset(entry.name, np.array(rows, dtype=float), np.array(labels), str(entry.file))


def make_blobs(n_per_class: int, m: int, separation: float, noise_sigma: float = 1.0,
               seed: int = 0) -> Dataset:
    """Two Gaussian clouds centred at +/-(separation/2) along the unit diagonal.

    Class 0 sits on the negative side, class 1 on the positive side.
    """
    if n_per_class < 1 or m < 1 or separation < 0 or noise_sigma <= 0:
        raise ValueError("invalid blob parameters")
    rng = np.random.default_rng(seed)
    direction = np.ones(m) / np.sqrt(m)
    offset = 0.5 * separation * direction
    X0 = -offset + noise_sigma * rng.standard_normal((n_per_class, m))
    X1 = offset + noise_sigma * rng.standard_normal((n_per_class, m))
    y = np.repeat([0, 1], n_per_class)
    return Dataset(f"blobs-m{m}-sep{separation:g}", np.vstack([X0, X1]), y, f"synthetic seed={seed}")


def write_csv(path, dataset: Dataset, header: bool = True):
    """Write features followed by the 0/1 label; readable back through a RegistryEntry."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if header:
            w.writerow([f"x{j}" for j in range(dataset.m)] + ["label"])
        for row, label in zip(dataset.X, dataset.y):
            w.writerow([repr(float(v)) for v in row] + [int(label)])
