"""Command line front end.

    aperiodic dict      --builtin fibonacci --cap 6
    aperiodic graph     --builtin one-defect --order 2 --dot out.dot
    aperiodic approx    --builtin table --n 3
    aperiodic spectrum  --builtin fibonacci --n 5 --lambda 1
    aperiodic converge  --builtin fibonacci --lambda 1 --n-max 8
    aperiodic probe     --diag=-1,0,1 --x 0 --m 2 --r 0.25

Exit codes: 0 success, 2 configuration error, 3 no global path,
4 numeric failure, 5 gate failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import corpus, debruijn, probes, spectra, subst
from .errors import (ConfigError, GateFailure, InvalidArgument, IterationCap, NoGlobalPath,
                     NumericFailure, SearchExhausted)
from .symcore import (AGREE_TO_CAP, Alphabet, BlockPattern, PeriodicConfiguration, Word,
                      complexity, containment_index, format_shape, periodic_dictionary,
                      proximity_index, validate_slice)

EXIT_OK, EXIT_CONFIG, EXIT_NO_PATH, EXIT_NUMERIC, EXIT_GATE = 0, 2, 3, 4, 5


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _fmt_level(x) -> str:
    return "inf" if x == AGREE_TO_CAP else str(x)


def _emit(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _parse_tile(text: str, alphabet: str | None) -> BlockPattern:
    rows = text.split("/")
    letters = alphabet or "".join(sorted(set(text.replace("/", ""))))
    alpha = Alphabet(tuple(letters))
    if len(rows) == 1:
        return Word.parse(alpha, rows[0]).to_block()
    return BlockPattern.from_rows(alpha, rows)


class Source:
    """What a job works on: a substitution, an explicit sequence or a periodic tile."""

    def __init__(self, args):
        picked = [a for a in ("builtin", "subst", "tile") if getattr(args, a, None)]
        if len(picked) != 1:
            raise ConfigError("give exactly one of --builtin, --subst, --tile")
        self.name = None
        self.substitution = None
        self.tile = None
        if args.builtin:
            if args.builtin not in corpus.BUILTINS:
                raise ConfigError(f"unknown builtin {args.builtin!r}; choose from {', '.join(corpus.BUILTINS)}")
            self.name = args.builtin
            if corpus.is_substitution(args.builtin):
                self.substitution = corpus.substitution(args.builtin)
        elif args.subst:
            self.substitution = subst.substitution_from_json(args.subst)
        else:
            try:
                self.tile = _parse_tile(args.tile, args.alphabet)
            except InvalidArgument as exc:
                raise ConfigError(str(exc)) from exc

    @property
    def dim(self) -> int:
        if self.substitution is not None:
            return self.substitution.dim
        if self.tile is not None:
            return self.tile.dim
        return 1

    @property
    def alphabet(self) -> Alphabet:
        if self.substitution is not None:
            return self.substitution.alphabet
        if self.tile is not None:
            return self.tile.alphabet
        return corpus.AB

    def dictionary(self, cap: int):
        if self.substitution is not None:
            d = subst.substitution_dictionary(self.substitution, cap)
            if not subst.primitivity(self.substitution).primitive:
                bad = validate_slice(d)
                if bad:
                    raise GateFailure("generated patterns do not form a dictionary:\n"
                                      + "\n".join(str(v) for v in bad[:20]))
            return d
        if self.tile is not None:
            return periodic_dictionary(PeriodicConfiguration(self.tile), cap)
        return corpus.sequence_dictionary(self.name, cap)


def _add_source(p: argparse.ArgumentParser) -> None:
    p.add_argument("--builtin", help=f"one of: {', '.join(corpus.BUILTINS)}")
    p.add_argument("--subst", help="substitution JSON file")
    p.add_argument("--tile", help="periodic tile, e.g. aab or ab/ba")
    p.add_argument("--alphabet", help="letters of the tile's alphabet, in order")
    p.add_argument("--seed", help=argparse.SUPPRESS)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="aperiodic", description="Periodic approximations of subshifts and their spectra.")
    sub = parser.add_subparsers(dest="task", required=True, parser_class=_Parser)

    p = sub.add_parser("dict", help="dictionary slice in canonical text form")
    _add_source(p)
    p.add_argument("--cap", type=int, default=4, help="largest pattern extent")
    p.add_argument("--out", help="write to this file instead of stdout")
    p.add_argument("--complexity", action="store_true", help="print pattern counts instead")

    p = sub.add_parser("graph", help="de Bruijn graph summary and DOT output")
    _add_source(p)
    p.add_argument("--order", type=int, default=1, help="pattern length of the vertices")
    p.add_argument("--dot", help="write the graph in DOT format here")
    p.add_argument("--highlight-path", action="store_true", help="colour a global closed path (exit 3 if none exists)")
    p.add_argument("--mode", choices=("edge", "vertex"), default="edge", help="cover every edge or every vertex")

    p = sub.add_parser("approx", help="periodic approximant")
    _add_source(p)
    p.add_argument("--order", type=int, help="use a closed de Bruijn path of this order")
    p.add_argument("--n", type=int, help="substitution exponent")
    p.add_argument("--start", help="starting tile for substitution approximants")
    p.add_argument("--cap", type=int, default=4, help="cap for the containment and agreement report")
    p.add_argument("--out", help="write the tile to this file")

    p = sub.add_parser("spectrum", help="band edges of a periodic Jacobi operator")
    _add_source(p)
    p.add_argument("--n", type=int, default=None, help="substitution exponent of the approximant")
    p.add_argument("--start", help="starting tile (default: the fixed-point seed)")
    p.add_argument("--lambda", dest="coupling", type=float, default=1.0, help="potential strength")
    p.add_argument("--letter", help="letter carrying the potential (default: first letter)")
    p.add_argument("--method", choices=("bracket", "grid"), default="bracket", help="exact bracketing or a sampled Bloch grid")
    p.add_argument("--tol", type=float, default=1e-10, help="band edge tolerance")
    p.add_argument("--csv", help="write the table here")

    p = sub.add_parser("converge", help="spectral convergence table")
    _add_source(p)
    p.add_argument("--lambda", dest="coupling", type=float, default=1.0, help="potential strength")
    p.add_argument("--letter", help="letter carrying the potential (default: first letter)")
    p.add_argument("--n-min", type=int, default=1, help="smallest exponent")
    p.add_argument("--n-max", type=int, default=8, help="largest exponent, also the reference")
    p.add_argument("--cap", type=int, default=10, help="cap for the proximity index")
    p.add_argument("--start", help="starting tile (default: the fixed-point seed)")
    p.add_argument("--tol", type=float, default=1e-10, help="band edge tolerance")
    p.add_argument("--csv", help="write the table here")

    p = sub.add_parser("probe", help="norm probes on diagonal test matrices")
    p.add_argument("--diag", help="comma separated real eigenvalues of a self-adjoint A")
    p.add_argument("--phases", help="comma separated eigenphases (radians) of a unitary U")
    p.add_argument("--x", type=float, default=0.0, help="centre of the probe")
    p.add_argument("--m", type=float, help="bound on |A - x| (default: spectral radius of A - x, plus 1)")
    p.add_argument("--r", type=float, required=True, help="probe radius")
    p.add_argument("--energy-phase", type=float, default=0.0, help="E = exp(i * phase) for --phases")
    p.add_argument("--seed", help=argparse.SUPPRESS)
    return parser


def _numbers(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"cannot parse numbers from {text!r}") from exc


def _start_tile(src: Source, args) -> BlockPattern:
    s = src.substitution
    if args.start:
        tile = _parse_tile(args.start, "".join(s.alphabet.letters))
        subst.approximant_gate(subst.substitution_dictionary(s, 2), tile)
        return tile
    return subst.default_seed(s)


def _spec(src: Source, args) -> spectra.JacobiSpec:
    letter = args.letter or src.alphabet.letters[0]
    if letter not in src.alphabet.letters:
        raise ConfigError(f"letter {letter!r} not in alphabet")
    return spectra.schroedinger_spec(letter, args.coupling)


def run_dict(args) -> int:
    src = Source(args)
    d = src.dictionary(args.cap)
    if args.complexity:
        comp = complexity(d)
        text = "".join(f"{format_shape(k)} {v}\n" for k, v in sorted(comp.values.items()))
    else:
        text = d.to_text()
    _emit(text, args.out)
    return EXIT_OK


def run_graph(args) -> int:
    src = Source(args)
    if src.dim != 1:
        raise ConfigError("de Bruijn graphs need a one-dimensional source")
    d = src.dictionary(args.order + 1)
    g = debruijn.build_graph(d, args.order)
    connected = debruijn.is_strongly_connected(g)
    path = None
    if args.highlight_path:
        path = debruijn.global_closed_path(g, args.mode)
    lines = [f"order {g.order}", f"vertices {len(g.vertices)}", f"edges {len(g.edges)}",
             f"strongly_connected {str(connected).lower()}", f"branching {debruijn.branching_count(g)}"]
    if path is not None:
        lines.append(f"path {' '.join(g.label(e) for e in path.edges)}")
    sys.stdout.write("\n".join(lines) + "\n")
    if args.dot:
        Path(args.dot).write_text(debruijn.to_dot(g, path))
    return EXIT_OK


def run_approx(args) -> int:
    src = Source(args)
    if args.order is not None:
        if src.dim != 1:
            raise ConfigError("--order needs a one-dimensional source")
        cap = max(args.cap, args.order + 1)
        d = src.dictionary(cap)
        g = debruijn.build_graph(d, args.order)
        path = debruijn.global_closed_path(g, "edge")
        word = debruijn.periodic_word_from_path(path)
        per = periodic_dictionary(PeriodicConfiguration(word.to_block()), cap)
        text = (f"tile {word}\nperiod {len(word)}\n"
                f"containment {_fmt_level(containment_index(per, d))}\n"
                f"agreement {_fmt_level(proximity_index(per, d))}\n")
        _emit(text, args.out)
        return EXIT_OK
    if src.substitution is None or args.n is None:
        raise ConfigError("approx needs --order, or a substitution source with --n")
    s = src.substitution
    tile = _start_tile(src, args)
    legal = src.dictionary(args.cap)
    row = subst.convergence_table(s, tile, args.n, args.cap, n_min=args.n, legal=legal)[0]
    cfg = subst.periodic_approximant(s, tile, args.n)
    text = (f"start {tile.text()}\nn {args.n}\nshape {format_shape(cfg.dims)}\n"
            f"containment {_fmt_level(row.containment)}\nagreement {_fmt_level(row.agreement)}\n"
            f"tile\n{cfg.tile.text().replace('/', chr(10))}\n")
    _emit(text, args.out)
    return EXIT_OK


def _one_dim_configs(src: Source, args, n_values) -> list[tuple[int, PeriodicConfiguration]]:
    if src.tile is not None:
        return [(0, PeriodicConfiguration(src.tile))]
    if src.substitution is not None:
        if src.substitution.dim != 1:
            raise ConfigError("spectra are computed for one-dimensional sources")
        tile = _start_tile(src, args)
        return [(n, subst.periodic_approximant(src.substitution, tile, n)) for n in n_values]
    if src.name == "one-defect":
        alpha = corpus.AB
        return [(n, PeriodicConfiguration(Word.parse(alpha, "b" + "a" * n).to_block())) for n in n_values]
    raise ConfigError(f"no periodic approximants for {src.name!r}")


def run_spectrum(args) -> int:
    src = Source(args)
    if src.tile is None and args.n is None:
        raise ConfigError("spectrum needs --tile or --n")
    configs = _one_dim_configs(src, args, [args.n])
    spec = _spec(src, args)
    rows = []
    for n, cfg in configs:
        bands = spectra.band_set(spectra.sample(spec, cfg), tol=args.tol, method=args.method)
        rows.append((n, cfg.dims[0], bands))
    _emit(spectra.bands_csv(rows), args.csv)
    return EXIT_OK


def run_converge(args) -> int:
    src = Source(args)
    if src.tile is not None:
        raise ConfigError("converge needs a builtin or substitution source")
    if args.n_min < 0 or args.n_max < args.n_min:
        raise ConfigError("need 0 <= n-min <= n-max")
    configs = _one_dim_configs(src, args, range(args.n_min, args.n_max + 1))
    legal = src.dictionary(args.cap)
    records = spectra.convergence_experiment(configs, _spec(src, args), legal, tol=args.tol)
    _emit(spectra.convergence_csv(records), args.csv)
    return EXIT_OK


def run_probe(args) -> int:
    if bool(args.diag) == bool(args.phases):
        raise ConfigError("give exactly one of --diag, --phases")
    if args.diag:
        vals = np.array(_numbers(args.diag))
        A = np.diag(vals)
        m = args.m if args.m is not None else float(np.abs(vals - args.x).max()) + 1.0
        result = probes.presence_probe(A, args.x, m, args.r)
    else:
        U = np.diag(np.exp(1j * np.array(_numbers(args.phases))))
        result = probes.unitary_probe(U, np.exp(1j * args.energy_phase), args.r)
    sys.stdout.write(("true" if result else "false") + "\n")
    return EXIT_OK


TASKS = {"dict": run_dict, "graph": run_graph, "approx": run_approx,
         "spectrum": run_spectrum, "converge": run_converge, "probe": run_probe}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "seed", None) is not None:
            raise ConfigError("--seed is not supported: every algorithm here is deterministic")
        return TASKS[args.task](args)
    except NoGlobalPath as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_PATH
    except GateFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GATE
    except (NumericFailure, IterationCap, SearchExhausted) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, InvalidArgument) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
