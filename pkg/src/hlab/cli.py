"""Command-line entry point.

Subcommands over a system file: render (attractor cloud + certificate),
verify (class membership reports), code (address-to-point), bounds
(convergence / Lipschitz / modulus report suite) and lattice (finite
greatest fixed points and the exact counterexample demos).

Exit codes: 0 holds/success, 2 fails-with-witness, 3 inconclusive,
1 usage or system-file errors.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .attractor import hb_step, iterate_attractor
from .coding import check_pi_lipschitz, code_point, inverse_modulus_check
from .errors import CapExceeded, SpecFormatError
from .exact import parse_scalar, scalar_to_json
from .ifs import (
    PropertyReport,
    check_locally_finite,
    check_non_overlapping,
    check_strongly_non_overlapping,
    load_spec,
    ssc_constants,
)
from .lattice import (
    check_continuity_premises,
    fractional_shift_counterexample,
    shrinking_images_counterexample,
    tk_gfp,
)
from .metric import hausdorff_dist
from .words import WordPrefix, parse_word

EXIT_OK, EXIT_ERROR, EXIT_FAILS, EXIT_INCONCLUSIVE = 0, 1, 2, 3
_VERDICT_EXIT = {"holds": EXIT_OK, "fails": EXIT_FAILS, "inconclusive": EXIT_INCONCLUSIVE}

_VERIFY_CLASSES = ("non-overlapping", "locally-finite", "strongly-non-overlapping", "ssc")
_DEMOS = {
    "gfp-continuity": "gfp-continuity",
    "remark31": "gfp-continuity",
    "image-closure": "image-closure",
    "remark42": "image-closure",
}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


@dataclass
class RunConfig:
    """Validated command parameters for one run."""

    command: str
    spec_path: str | None = None
    verify_class: str | None = None
    word: str | None = None
    steps: int | None = None
    depth: int | None = None
    target_error: object = None
    epsilon: object = None
    exact: bool = False
    truncate: int | None = None
    out: str | None = None
    png: int | None = None
    cap: int = 1_000_000
    demo: list | None = None
    lattice_file: str | None = None

    def __post_init__(self):
        if self.steps is not None and self.steps < 0:
            raise _UsageError("--steps must be >= 0")
        if self.depth is not None and self.depth < 0:
            raise _UsageError("--depth must be >= 0")
        if self.target_error is not None and not self.target_error > 0:
            raise _UsageError("--target-error must be > 0")
        if self.epsilon is not None and self.epsilon < 0:
            raise _UsageError("--epsilon must be >= 0")
        if self.png is not None and self.png < 8:
            raise _UsageError("--png width must be >= 8")
        if self.cap < 1:
            raise _UsageError("--cap must be >= 1")
        if self.truncate is not None and self.truncate < 1:
            raise _UsageError("--truncate must be >= 1")


def _build_parser() -> _Parser:
    p = _Parser(prog="hlab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, spec=True):
        if spec:
            sp.add_argument("spec", help="system JSON file")
        sp.add_argument("--exact", action="store_true", help="require exact rational data")
        sp.add_argument("--truncate", type=int, help="override family truncation")
        sp.add_argument("--cap", type=int, default=1_000_000, help="cloud/pair cap")
        sp.add_argument("--out", help="output path or prefix")

    sp = sub.add_parser("render", help="iterate the attractor and export CSV/JSON/PNG")
    common(sp)
    sp.add_argument("--steps", type=int, help="number of set-map iterations")
    sp.add_argument("--target-error", help="certified bound to reach (number or p/q)")
    sp.add_argument("--epsilon", help="final pruning resolution (number or p/q)")
    sp.add_argument("--png", type=int, metavar="WIDTH", help="also raster the cloud")

    sp = sub.add_parser("verify", help="class-membership report")
    sp.add_argument("klass", choices=_VERIFY_CLASSES, metavar="class",
                    help="|".join(_VERIFY_CLASSES))
    common(sp)
    sp.add_argument("--depth", type=int, help="word depth for the strong check")
    sp.add_argument("--steps", type=int, help="iterations for the ssc attractor cloud")
    sp.add_argument("--epsilon", help="cell size for locally-finite")

    sp = sub.add_parser("code", help="code a word prefix to an attractor point")
    common(sp)
    sp.add_argument("--word", required=True, help="dotted word literal, e.g. 1.2.1")
    sp.add_argument("--depth", type=int, help="use only the first DEPTH letters")
    sp.add_argument("--steps", type=int, help="iterations for the reference cloud")

    sp = sub.add_parser("bounds", help="convergence, Lipschitz and modulus reports")
    common(sp)
    sp.add_argument("--steps", type=int, help="iterations for the reference cloud")
    sp.add_argument("--depth", type=int, help="prefix depth for sampled pairs")
    sp.add_argument("--epsilon", help="modulus radius eps (number or p/q)")

    sp = sub.add_parser("lattice", help="finite GFP iteration or counterexample demos")
    sp.add_argument("file", nargs="?", help="JSON with universe and map tables")
    sp.add_argument("--demo", nargs="+", metavar="NAME ARG",
                    help="gfp-continuity N M | image-closure M (aliases remark31/remark42)")
    sp.add_argument("--out", help="output path")
    return p


def _config_from_args(args) -> RunConfig:
    kw = dict(
        command=args.command,
        exact=getattr(args, "exact", False),
        truncate=getattr(args, "truncate", None),
        cap=getattr(args, "cap", 1_000_000),
        out=getattr(args, "out", None),
        steps=getattr(args, "steps", None),
        depth=getattr(args, "depth", None),
        png=getattr(args, "png", None),
        word=getattr(args, "word", None),
        demo=getattr(args, "demo", None),
    )
    if args.command == "lattice":
        kw["lattice_file"] = args.file
    else:
        kw["spec_path"] = args.spec
    if args.command == "verify":
        kw["verify_class"] = args.klass
    for name in ("target_error", "epsilon"):
        raw = getattr(args, name, None)
        if raw is not None:
            try:
                kw[name] = parse_scalar(raw)
            except ValueError as exc:
                raise _UsageError(f"--{name.replace('_', '-')}: {exc}") from exc
    return RunConfig(**kw)


def _emit(obj, out_path=None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    sys.stdout.write(text)
    if out_path:
        Path(out_path).write_text(text, encoding="ascii")


def _load(config: RunConfig):
    spec = load_spec(config.spec_path, config.truncate)
    if config.exact and not spec.is_exact:
        raise SpecFormatError("--exact set but the system carries float data")
    return spec


def _write_png(cloud, box, width: int, path) -> None:
    from PIL import Image

    arr = cloud.array()
    xlo, xhi = (float(v) for v in box.bounds[0])
    xspan = (xhi - xlo) or 1.0
    if cloud.dimension == 1:
        height = max(8, width // 16)
        px = np.clip(((arr[:, 0] - xlo) / xspan * (width - 1)).astype(int), 0, width - 1)
        pixels = np.full((height, width), 255, dtype=np.uint8)
        pixels[:, px] = 0
    elif cloud.dimension == 2:
        ylo, yhi = (float(v) for v in box.bounds[1])
        yspan = (yhi - ylo) or 1.0
        height = max(8, round(width * yspan / xspan))
        px = np.clip(((arr[:, 0] - xlo) / xspan * (width - 1)).astype(int), 0, width - 1)
        py = np.clip(((arr[:, 1] - ylo) / yspan * (height - 1)).astype(int), 0, height - 1)
        pixels = np.full((height, width), 255, dtype=np.uint8)
        pixels[height - 1 - py, px] = 0
    else:
        raise ValueError("PNG rendering supports 1-D and 2-D clouds only")
    Image.fromarray(pixels, mode="L").save(path)


def _cmd_render(config: RunConfig) -> int:
    spec = _load(config)
    kwargs = {"eps_final": config.epsilon or 0, "cap": config.cap}
    if config.steps is None and config.target_error is None:
        raise _UsageError("render needs --steps or --target-error")
    if config.steps is not None:
        approx = iterate_attractor(spec, n_steps=config.steps, **kwargs)
    else:
        approx = iterate_attractor(spec, target_error=config.target_error, **kwargs)
    prefix = config.out or Path(config.spec_path).stem
    approx.cloud.to_csv(f"{prefix}.csv")
    sidecar = {
        "n": approx.iterations,
        "c": scalar_to_json(approx.contraction),
        "h01": scalar_to_json(approx.h01),
        "error_bound": scalar_to_json(approx.error_bound),
        "pruning_slack": scalar_to_json(approx.pruning_slack),
        "truncation": spec.truncation,
    }
    Path(f"{prefix}.json").write_text(
        json.dumps(sidecar, indent=2, sort_keys=True) + "\n", encoding="ascii"
    )
    if config.png:
        _write_png(approx.cloud, spec.box, config.png, f"{prefix}.png")
    sys.stdout.write(f"{prefix}.csv {prefix}.json" + (f" {prefix}.png\n" if config.png else "\n"))
    return EXIT_OK


def _ssc_as_report(spec, approx) -> PropertyReport:
    ssc = ssc_constants(spec, approx)
    details = ssc.as_dict()
    if not ssc.pairs:
        details["note"] = "single map: no separation pairs"
        return PropertyReport("ssc", "holds", ssc.sep_c, None, details)
    if ssc.sep_c == 0:
        worst = min(ssc.pairs, key=lambda k: ssc.pairs[k])
        return PropertyReport("ssc", "fails", 0, worst, details)
    return PropertyReport("ssc", "holds", ssc.sep_c, None, details)


def _cmd_verify(config: RunConfig) -> int:
    spec = _load(config)
    if config.verify_class == "non-overlapping":
        report = check_non_overlapping(spec)
    elif config.verify_class == "locally-finite":
        eps = config.epsilon
        if eps is None:
            lo, hi = spec.box.bounds[0]
            eps = (hi - lo) / 8
        report = check_locally_finite(spec, eps)
    elif config.verify_class == "strongly-non-overlapping":
        report = check_strongly_non_overlapping(spec, config.depth or 5, config.cap)
    else:
        approx = iterate_attractor(spec, n_steps=config.steps or 8, cap=config.cap)
        report = _ssc_as_report(spec, approx)
    _emit(report.as_dict(), config.out)
    return _VERDICT_EXIT[report.verdict]


def _cmd_code(config: RunConfig) -> int:
    spec = _load(config)
    word = parse_word(config.word or "", WordPrefix)
    if config.depth is not None:
        if config.depth > len(word):
            raise _UsageError(f"--depth {config.depth} exceeds the literal's length {len(word)}")
        word = WordPrefix(word.letters[: config.depth])
    approx = iterate_attractor(spec, n_steps=config.steps or 10, cap=config.cap)
    cp = code_point(spec, approx, word)
    _emit(
        {
            "point": [scalar_to_json(v) for v in cp.point],
            "error_bound": scalar_to_json(cp.error_bound),
        },
        config.out,
    )
    return EXIT_OK


def _cmd_bounds(config: RunConfig) -> int:
    spec = _load(config)
    steps = config.steps or 10
    depth = config.depth or 10
    approx = iterate_attractor(spec, n_steps=steps, cap=config.cap)
    residual = hausdorff_dist(approx.cloud, hb_step(spec, approx.cloud, 0))
    allowed = 2 * (approx.error_bound + approx.pruning_slack)
    allowed = allowed if spec.is_exact else allowed + 1e-9
    rate = PropertyReport(
        "convergence-rate",
        "holds" if residual <= allowed else "fails",
        residual,
        None if residual <= allowed else ("invariance residual exceeded",),
        {"n": approx.iterations, "residual": residual, "allowed": allowed,
         "error_bound": approx.error_bound},
    )
    rng = random.Random(0)
    prefixes = [
        WordPrefix(tuple(rng.choice(spec.symbols) for _ in range(depth)))
        for _ in range(400)
    ]
    pairs = [(prefixes[2 * i], prefixes[2 * i + 1]) for i in range(200)]
    try:
        lipschitz = check_pi_lipschitz(spec, approx, pairs)
    except ValueError as exc:
        lipschitz = PropertyReport("coding-lipschitz", "inconclusive", 0, None,
                                   {"reason": str(exc)})
    eps = config.epsilon if config.epsilon is not None else Fraction(1, 9)
    mod_depth = depth
    while len(spec.symbols) ** mod_depth > 1024 and mod_depth > 1:
        mod_depth -= 1
    try:
        modulus = inverse_modulus_check(spec, approx, eps, depth=mod_depth, pair_cap=config.cap)
    except ValueError as exc:
        modulus = PropertyReport("inverse-modulus", "inconclusive", 0, None,
                                 {"reason": str(exc)})
    reports = [rate, lipschitz, modulus]
    _emit([r.as_dict() for r in reports], config.out)
    if any(r.verdict == "fails" for r in reports):
        return EXIT_FAILS
    if any(r.verdict == "inconclusive" for r in reports):
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def _cmd_lattice(config: RunConfig) -> int:
    if config.demo:
        name, *rest = config.demo
        if name not in _DEMOS:
            raise _UsageError(f"unknown demo {name!r}")
        try:
            nums = [int(v) for v in rest]
        except ValueError as exc:
            raise _UsageError(f"demo arguments must be integers: {exc}") from exc
        if _DEMOS[name] == "gfp-continuity":
            if len(nums) != 2:
                raise _UsageError("gfp-continuity demo needs N and M")
            report = fractional_shift_counterexample(*nums)
        else:
            if len(nums) != 1:
                raise _UsageError("image-closure demo needs M")
            report = shrinking_images_counterexample(nums[0])
        _emit(report.as_dict(), config.out)
        return _VERDICT_EXIT[report.verdict]
    if not config.lattice_file:
        raise _UsageError("lattice needs a file or --demo")
    try:
        data = json.loads(Path(config.lattice_file).read_text(encoding="utf-8"))
        universe = [str(u) for u in data["universe"]]
        maps = {
            str(name): {str(k): str(v) for k, v in table.items()}
            for name, table in data["maps"].items()
        }
    except (OSError, json.JSONDecodeError, KeyError, AttributeError, TypeError) as exc:
        raise SpecFormatError(f"bad lattice file: {exc}") from exc
    result = tk_gfp(maps, universe)
    premises = check_continuity_premises(maps, universe)
    _emit(
        {
            "gfp": sorted(result.gfp),
            "steps": result.steps,
            "chain_sizes": list(result.chain_sizes),
            "fixed_verified": result.fixed_verified,
            "premises": premises.as_dict(),
        },
        config.out,
    )
    return _VERDICT_EXIT[premises.verdict]


_COMMANDS = {
    "render": _cmd_render,
    "verify": _cmd_verify,
    "code": _cmd_code,
    "bounds": _cmd_bounds,
    "lattice": _cmd_lattice,
}


def run(config: RunConfig) -> int:
    return _COMMANDS[config.command](config)


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        config = _config_from_args(args)
        return run(config)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (SpecFormatError, CapExceeded, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
