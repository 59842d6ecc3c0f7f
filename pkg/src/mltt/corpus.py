"""The proof corpus: manifest, loading and verification."""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from .evaluator import Globals
from .kernel import DEFAULT_FUEL, TypeCheckError, check_declaration
from .parser import ParseError, load_source
from .syntax import Declaration

CORPUS_ENV = "MLTT_CORPUS_DIR"

# Declarations the corpus must contain, each with the result it formalizes.
MANDATORY = {
    "k": "combinator for phi -> chi -> phi",
    "s": "combinator for (phi -> chi -> psi) -> (phi -> chi) -> phi -> psi",
    "sym": "propositional equality is symmetric",
    "trans": "propositional equality is transitive",
    "uniq_coprod": "every element of a coproduct is an injection",
    "based_contr": "based path spaces are contractible",
    "ap": "functions act on paths",
    "transport": "transport along a path",
    "j_from_transport": "based path induction from transport and contractibility",
    "unbased_j": "unbased path induction from based path induction",
    "nat_add": "addition by the natural number recursor",
    "double": "doubling by the natural number recursor",
    "list_fold": "right fold by the list recursor",
    "nat_iso": "unary and binary naturals are equivalent",
    "double'": "doubling transported to unary naturals",
    "homotopy": "pointwise equality of functions",
    "isequiv": "two-sided invertibility",
    "equiv": "type of equivalences",
    "idtoeq": "paths between types give equivalences",
    "isProp": "mere propositions",
    "isSet": "sets",
    "unit_isProp": "the unit type is a proposition",
    "bottom_isProp": "the empty type is a proposition",
    "isUnivalent": "statement of univalence",
    "univ": "the univalence axiom",
    "trunc_demo": "propositional truncation introduction",
}


class CorpusError(Exception):
    """A corpus file could not be found, parsed or checked."""

    def __init__(self, message: str, file: Optional[str] = None, decl: Optional[str] = None,
                 cause: Optional[Exception] = None):
        super().__init__(message)
        self.file = file
        self.decl = decl
        self.cause = cause


@dataclass(frozen=True)
class ManifestEntry:
    file: str
    allow_axioms: bool = False


@dataclass
class CorpusManifest:
    root: Path
    entries: list[ManifestEntry]

    def paths(self) -> list[Path]:
        return [self.root / e.file for e in self.entries]


def corpus_dir(explicit: Optional[str | Path] = None) -> Path:
    """Where the corpus lives: an explicit path, ``$MLTT_CORPUS_DIR``, or the
    ``corpus`` directory next to the source tree."""
    if explicit is not None:
        return Path(explicit)
    env = os.environ.get(CORPUS_ENV)
    if env:
        return Path(env)
    here = Path(__file__).resolve()
    for parent in here.parents:
        cand = parent / "corpus"
        if (cand / "MANIFEST").is_file():
            return cand
    raise CorpusError(f"no corpus directory found; set {CORPUS_ENV}")


def parse_manifest(text: str, root: Path) -> CorpusManifest:
    entries = []
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fname, *flags = line.split()
        unknown = [f for f in flags if f != "allow-axioms"]
        if unknown:
            raise CorpusError(f"MANIFEST line {lineno}: unknown flag {unknown[0]!r}")
        if fname in seen:
            raise CorpusError(f"MANIFEST line {lineno}: {fname} listed twice")
        seen.add(fname)
        entries.append(ManifestEntry(fname, "allow-axioms" in flags))
    return CorpusManifest(root, entries)


def load_manifest(root: Optional[str | Path] = None) -> CorpusManifest:
    root = corpus_dir(root)
    path = root / "MANIFEST"
    if not path.is_file():
        raise CorpusError(f"{path} does not exist")
    return parse_manifest(path.read_text(), root)


@dataclass
class CheckedDecl:
    name: str
    file: str
    seconds: float


@dataclass
class CorpusReport:
    checked: list[CheckedDecl] = field(default_factory=list)
    failure: Optional[CorpusError] = None
    glob: Globals = field(default_factory=Globals)
    seconds: float = 0.0

    @property
    def names(self) -> set[str]:
        return {c.name for c in self.checked}

    @property
    def missing(self) -> list[str]:
        return [n for n in MANDATORY if n not in self.names]

    @property
    def ok(self) -> bool:
        return self.failure is None and not self.missing

    def text(self) -> str:
        lines = [f"{c.file}\t{c.name}\t{c.seconds * 1000:.1f} ms" for c in self.checked]
        if self.failure is not None:
            f = self.failure
            lines.append(f"FAIL {f.file}: {f.decl or ''}: {f}")
        elif self.missing:
            lines.append("MISSING " + ", ".join(self.missing))
        lines.append(f"{len(self.checked)} declarations, {self.seconds:.2f} s, "
                     f"{'ok' if self.ok else 'FAILED'}")
        return "\n".join(lines)


def load_file(path: Path, glob: Globals, allow_axioms: bool, eta: bool = True,
              max_universe: Optional[int] = None, fuel: Optional[int] = DEFAULT_FUEL,
              on_checked=None) -> list[Declaration]:
    """Parse and check one file against ``glob``, extending it declaration by declaration."""
    try:
        decls = load_source(path.read_text(), glob.names(), filename=str(path))
    except (OSError, ParseError) as e:
        raise CorpusError(str(e), path.name, cause=e) from e
    for d in decls:
        if not isinstance(d, Declaration):
            raise CorpusError(f"{d.name}: equivalence declarations belong to the fragment checker",
                              path.name, d.name)
        t0 = time.perf_counter()
        try:
            check_declaration(glob, d, allow_axioms, eta, max_universe, fuel)
        except TypeCheckError as e:
            raise CorpusError(str(e), path.name, d.name, e) from e
        glob.add(d)
        if on_checked:
            on_checked(CheckedDecl(d.name, path.name, time.perf_counter() - t0))
    return decls


def verify_corpus(manifest: Optional[CorpusManifest] = None,
                  allow_axioms: Optional[bool] = None, eta: bool = True,
                  max_universe: Optional[int] = None, strict: bool = False) -> CorpusReport:
    """Check every manifest file in order.

    ``allow_axioms`` None follows the manifest's per-file flags; True or False
    overrides them for every file.  Checking stops at the first failure, which
    the report records (or raises, with ``strict``).
    """
    manifest = manifest or load_manifest()
    report = CorpusReport()
    t0 = time.perf_counter()
    try:
        for entry in manifest.entries:
            allowed = entry.allow_axioms if allow_axioms is None else allow_axioms
            load_file(manifest.root / entry.file, report.glob, allowed, eta, max_universe,
                      on_checked=report.checked.append)
    except CorpusError as e:
        report.failure = e
        if strict:
            raise
    finally:
        report.seconds = time.perf_counter() - t0
    return report


def load_corpus(root: Optional[str | Path] = None, axioms: bool = True,
                files: Optional[Sequence[str]] = None) -> Globals:
    """Checked declarations of the corpus.  ``axioms`` False skips files that postulate."""
    manifest = load_manifest(root)
    glob = Globals()
    for entry in manifest.entries:
        if files is not None and entry.file not in files:
            continue
        if entry.allow_axioms and not axioms:
            continue
        load_file(manifest.root / entry.file, glob, entry.allow_axioms)
    return glob
