"""Command-line interface for denoising, segmentation and benchmarks.

Usage:
    python -m src.cli denoise input.png --preset gm-aniso-sigma01 --output out.png
    python -m src.cli segment --synthetic step:64 --preset ms-man --output u.png --edges s.png
    python -m src.cli bench --synthetic disk:64 --noise-sigma 0.1 --csv bench.csv
    python -m src.cli verify
    python -m src.cli schemes --synthetic squares:128 --csv schemes.csv

Exit codes: 0 success, 1 usage or input error, 2 solver runtime error,
3 failed verification.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from pydantic import ValidationError

from .bench import DEFAULT_VARIANTS, FLOAT_FORMAT, compare_schemes, run_benchmark, work_to_reach, write_csv
from .driver import RunConfig, USolver, run
from .exceptions import PrecondHQError
from .grid.fields import ScalarField
from .imageio import NoiseSpec, add_gaussian_noise, make_synthetic, parse_synthetic, read_image, write_image
from .metrics import psnr
from .models.config import ModelConfig, ModelKind
from .presets import anisotropic_denoising_presets, get_preset
from .settings import load_settings, setup_logging
from .solvers.precond import SweepSpec
from .verify import run_suite

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2
EXIT_VERIFY = 3

# Values used when neither a preset, a settings file nor a flag sets them.
DEFAULTS: Dict[str, Any] = {
    "model": None,
    "isotropy": None,
    "mu": None,
    "lam": None,
    "alpha": None,
    "epsilon": None,
    "kappa": None,
    "gamma_prox": 1e-5,
    "sweeps": 10,
    "eta": 1e-5,
    "scheme": "nffd",
    "max_iters": 300,
    "tol": 1e-8,
    "noise_sigma": 0.0,
    "seed": 0,
    "solver": "srbgs",
    "cg_tol": 1e-3,
    "gr_legacy_orientation": False,
    "ms_previous_u": False,
}

_SETTING_ALIASES = {"lambda": "lam", "n": "sweeps", "max_outer_iters": "max_iters"}


class CliUsageError(Exception):
    """Invalid command line or settings."""
    pass


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise CliUsageError(f"{self.prog}: {message}")


def _add_common_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("input", nargs="?", help="Input image (.pgm or .png)")
    parser.add_argument("--synthetic", metavar="NAME:SIZE",
                        help="Use a synthetic image (disk, squares, step, piecewise_smooth)")
    parser.add_argument("-c", "--config", help="Settings file (YAML or key=value)")
    parser.add_argument("--preset", help="Named parameter preset")
    parser.add_argument("--model", choices=[m.value for m in ModelKind], help="Model family")
    iso = parser.add_mutually_exclusive_group()
    iso.add_argument("--isotropy", choices=["iso", "aniso"], help="Regularizer type")
    iso.add_argument("--iso", dest="isotropy", action="store_const", const="iso",
                     help="Same as --isotropy iso")
    iso.add_argument("--aniso", dest="isotropy", action="store_const", const="aniso",
                     help="Same as --isotropy aniso")
    parser.add_argument("--mu", type=float, help="Regularization weight")
    parser.add_argument("--lambda", dest="lam", type=float, help="Threshold / edge weight")
    parser.add_argument("--kappa", type=float, help="GY auxiliary prox weight (default mu)")
    parser.add_argument("--sweeps", type=int, help="SRBGS cycles per u-step (default 10)")
    parser.add_argument("--eta", type=float, help="Proximal shift of the u-step (default 1e-5)")
    parser.add_argument("--scheme", choices=["nffd", "sffd"], help="Diffusion discretization")
    parser.add_argument("--max-iters", type=int, help="Outer iteration cap (default 300)")
    parser.add_argument("--tol", type=float, help="Relative energy-change stop tolerance (default 1e-8)")
    parser.add_argument("--noise-sigma", type=float, help="Add seeded Gaussian noise to the input")
    parser.add_argument("--seed", type=int, help="Noise seed (default 0)")
    parser.add_argument("--reference", help="Clean image for PSNR reporting")
    parser.add_argument("--no-timing", action="store_true",
                        help="Write zero wall-clock seconds so CSV output is reproducible")
    parser.add_argument("-v", "--verbose", action="store_true", help="Enable DEBUG logging")
    parser.add_argument("--log-file", help="Also write the log to this file")


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="python -m src.cli",
        description="Preconditioned alternating minimization for half-quadratic image models",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    denoise = sub.add_parser("denoise", help="Denoise an image with GR, GY, GM or HL")
    _add_common_arguments(denoise)
    denoise.add_argument("-o", "--output", default="denoised.png", help="Output image")
    denoise.add_argument("--trace", help="Write the per-iteration trace as CSV")
    denoise.add_argument("--solver", choices=[s.value for s in USolver], help="u-step solver")
    denoise.add_argument("--cg-tol", type=float, help="Relative tolerance of CG u-steps")
    denoise.add_argument("--gr-legacy-orientation", action="store_true", default=None,
                         help="Use lambda/mu in the GR b-update")
    denoise.set_defaults(handler=cmd_denoise)

    segment = sub.add_parser("segment", help="Mumford-Shah segmentation")
    _add_common_arguments(segment)
    segment.add_argument("--alpha", type=float, help="Edge-aware smoothing weight")
    segment.add_argument("--epsilon", type=float, help="Edge-indicator width")
    segment.add_argument("--gamma-prox", type=float, help="Prox weight of the s-step (default 1e-5)")
    segment.add_argument("--ms-previous-u", action="store_true", default=None,
                         help="Build the s-step reaction term from the previous u")
    segment.add_argument("--rescale", action="store_true",
                         help="Rescale the preset's alpha from 512x512 to the input size")
    segment.add_argument("-o", "--output", default="segmented.png", help="Smoothed image output")
    segment.add_argument("--edges", help="Edge indicator output (default <output>_edges)")
    segment.add_argument("--trace", help="Write the per-iteration trace as CSV")
    segment.set_defaults(handler=cmd_segment)

    bench = sub.add_parser("bench", help="Compare SRBGS and CG u-steps (default preset hl-aniso-sigma01)")
    _add_common_arguments(bench)
    bench.add_argument("--variants", default=",".join(DEFAULT_VARIANTS),
                       help="Comma-separated variant labels")
    bench.add_argument("--csv", default="bench.csv", help="Benchmark CSV output")
    bench.set_defaults(handler=cmd_bench)

    verify = sub.add_parser("verify", help="Run the invariant suite on small grids")
    verify.add_argument("--sizes", default="3x3,4x5,7x7", help="Comma-separated MxN grid sizes")
    verify.add_argument("--seed", type=int, default=0, help="Seed of the random test data")
    verify.add_argument("-v", "--verbose", action="store_true", help="Enable DEBUG logging")
    verify.add_argument("--log-file", help="Also write the log to this file")
    verify.set_defaults(handler=cmd_verify, config=None)

    schemes = sub.add_parser("schemes", help="Compare NFFD and SFFD on every anisotropic preset")
    _add_common_arguments(schemes)
    schemes.add_argument("--csv", default="schemes.csv", help="Comparison CSV output")
    schemes.set_defaults(handler=cmd_schemes)

    return parser


# ------------------------------------------------------------------ options

def resolve_options(args: argparse.Namespace, default_preset: Optional[str] = None) -> Dict[str, Any]:
    """Merge defaults, preset, settings file and flags (in that order).

    Raises:
        CliUsageError: On unknown settings keys
        KeyError: On an unknown preset
    """
    settings = dict(getattr(args, "_settings", {}))
    settings.pop("logging", None)
    settings = {_SETTING_ALIASES.get(k, k): v for k, v in settings.items()}

    values = dict(DEFAULTS)
    preset_name = getattr(args, "preset", None) or settings.pop("preset", None) or default_preset
    settings.pop("preset", None)
    if preset_name:
        preset = get_preset(preset_name)
        logger.info(f"Using preset {preset.name} ({preset.description})")
        values.update({
            "model": preset.model.value,
            "isotropy": preset.isotropy.value,
            "mu": preset.mu,
            "lam": preset.lam,
            "alpha": preset.alpha,
            "epsilon": preset.epsilon,
        })
        values["_preset"] = preset

    unknown = sorted(k for k in settings if k not in DEFAULTS)
    if unknown:
        raise CliUsageError(f"Unknown setting(s): {', '.join(unknown)}")
    values.update(settings)

    for key in DEFAULTS:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    return values


def build_model_config(values: Dict[str, Any]) -> ModelConfig:
    """Validate the merged options into a ModelConfig."""
    if values.get("model") is None:
        raise CliUsageError("No model selected; pass --model or --preset")
    sweep = SweepSpec(n=values["sweeps"], eta=values["eta"], scheme=values["scheme"])
    fields = {
        "model": values["model"],
        "mu": values["mu"],
        "lam": values["lam"],
        "alpha": values["alpha"],
        "epsilon": values["epsilon"],
        "kappa": values["kappa"],
        "gamma_prox": values["gamma_prox"],
        "sweep": sweep,
        "gr_legacy_orientation": values["gr_legacy_orientation"],
        "ms_reaction_uses_previous_u": values["ms_previous_u"],
    }
    if values.get("isotropy") is not None:
        fields["isotropy"] = values["isotropy"]
    return ModelConfig(**{k: v for k, v in fields.items() if v is not None})


def load_input(args: argparse.Namespace, values: Dict[str, Any]) -> Tuple[ScalarField, Optional[ScalarField]]:
    """Read or synthesize the clean input and apply the requested noise.

    Returns:
        Tuple of (observed image, reference image or None). The clean image
        serves as reference when noise is added or the input is synthetic.
    """
    if args.synthetic:
        name, size = parse_synthetic(args.synthetic)
        clean = make_synthetic(name, size)
        reference = clean
    elif args.input:
        clean = read_image(args.input)
        reference = None
    else:
        raise CliUsageError("An input image or --synthetic NAME:SIZE is required")

    if args.reference:
        reference = read_image(args.reference)

    noise = NoiseSpec(sigma=values["noise_sigma"], seed=values["seed"])
    observed = add_gaussian_noise(clean, noise)
    if noise.sigma > 0 and reference is None:
        reference = clean
    return observed, reference


def _run_config(values: Dict[str, Any], model: ModelConfig, reference: Optional[ScalarField]) -> RunConfig:
    return RunConfig(
        model=model,
        max_outer_iters=values["max_iters"],
        energy_rel_tol=values["tol"],
        u_solver=values["solver"],
        cg_rel_tol=values["cg_tol"],
        reference=reference,
    )


def _write_trace(path: Optional[str], trace, timing: bool) -> None:
    if not path:
        return
    df = trace.to_dataframe()
    if not timing:
        df["seconds"] = 0.0
    df.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    logger.info(f"Wrote trace ({len(df)} rows) to {path}")


def _print_summary(title: str, items: Dict[str, Any]) -> None:
    print("\n" + "=" * 50)
    print(title)
    print("=" * 50)
    for key, value in items.items():
        print(f"  {key}: {value}")


# ----------------------------------------------------------------- commands

def cmd_denoise(args: argparse.Namespace) -> int:
    values = resolve_options(args)
    model = build_model_config(values)
    if model.model == ModelKind.MS:
        raise CliUsageError("The MS model is handled by the 'segment' command")
    observed, reference = load_input(args, values)

    state, trace = run(_run_config(values, model, reference), observed)
    write_image(args.output, state.u)
    _write_trace(args.trace, trace, not args.no_timing)

    summary = {
        "model": f"{model.model.value}/{model.isotropy.value}",
        "iterations": len(trace),
        "final energy": f"{trace.final_energy:.10g}",
        "work units": trace.records[-1].work_units if trace.records else 0,
        "output": args.output,
    }
    if reference is not None:
        summary["input psnr"] = f"{psnr(observed, reference):.2f} dB"
        summary["output psnr"] = f"{psnr(state.u, reference):.2f} dB"
    _print_summary("DENOISING RESULTS", summary)
    return EXIT_OK


def cmd_segment(args: argparse.Namespace) -> int:
    values = resolve_options(args)
    values["model"] = ModelKind.MS.value
    values["isotropy"] = "iso"
    observed, reference = load_input(args, values)

    preset = values.get("_preset")
    if args.rescale and preset is not None and args.alpha is None:
        values["alpha"] = preset.rescaled(observed.shape[0]).alpha
    model = build_model_config(values)

    state, trace = run(_run_config(values, model, reference), observed)
    output = Path(args.output)
    edges = Path(args.edges) if args.edges else output.with_name(f"{output.stem}_edges{output.suffix}")
    write_image(output, state.u)
    write_image(edges, state.aux)
    _write_trace(args.trace, trace, not args.no_timing)

    _print_summary("SEGMENTATION RESULTS", {
        "iterations": len(trace),
        "final energy": f"{trace.final_energy:.10g}",
        "edge pixels (s < 0.5)": int((state.aux < 0.5).sum()),
        "output": str(output),
        "edges": str(edges),
    })
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    values = resolve_options(args, default_preset="hl-aniso-sigma01")
    model = build_model_config(values)
    observed, reference = load_input(args, values)
    variants = [v.strip() for v in args.variants.split(",") if v.strip()]

    df = run_benchmark(model, observed, reference, variants, values["max_iters"],
                       energy_rel_tol=0.0, timing=not args.no_timing)
    write_csv(df, args.csv)

    reach = work_to_reach(df)
    final = df.groupby("variant", sort=False)["energy"].last()
    _print_summary("BENCHMARK RESULTS", {
        label: f"final energy {final[label]:.10g}, work to 0.1% gap {reach[label]:g}"
        for label in variants
    })
    return EXIT_OK


def _parse_sizes(text: str) -> List[Tuple[int, int]]:
    sizes = []
    for item in text.split(","):
        m, sep, n = item.strip().lower().partition("x")
        try:
            shape = (int(m), int(n))
        except ValueError:
            raise CliUsageError(f"Invalid grid size '{item}' (expected MxN)")
        if not sep or min(shape) < 2:
            raise CliUsageError(f"Invalid grid size '{item}' (expected MxN with M, N >= 2)")
        sizes.append(shape)
    return sizes


def cmd_verify(args: argparse.Namespace) -> int:
    results = run_suite(_parse_sizes(args.sizes), seed=args.seed)
    failed = [r for r in results if not r.passed]
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name}: {r.detail}")
    print(f"\n{len(results) - len(failed)}/{len(results)} checks passed")
    return EXIT_VERIFY if failed else EXIT_OK


def cmd_schemes(args: argparse.Namespace) -> int:
    values = resolve_options(args)
    if not args.synthetic and not args.input:
        args.synthetic = "squares:128"
    sigma = float(values["noise_sigma"]) or 0.1
    values["noise_sigma"] = 0.0
    clean, _ = load_input(args, values)

    presets = anisotropic_denoising_presets(sigma)
    df = compare_schemes(clean, presets, NoiseSpec(sigma=sigma, seed=values["seed"]),
                         sweeps=values["sweeps"], max_outer_iters=values["max_iters"],
                         energy_rel_tol=values["tol"])
    write_csv(df, args.csv)
    _print_summary("SCHEME COMPARISON (PSNR dB)", {
        row.model: f"NFFD {row.nffd_psnr:.2f}, SFFD {row.sffd_psnr:.2f}, noisy {row.noisy_psnr:.2f}"
        for row in df.itertuples()
    })
    return EXIT_OK


# --------------------------------------------------------------------- main

def main(argv: Optional[List[str]] = None) -> int:
    """Parse ``argv``, run the selected command and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        settings = load_settings(args.config) if getattr(args, "config", None) else {}
        log_config = dict(settings.get("logging") or {})
        if args.log_file:
            log_config["file"] = args.log_file
        setup_logging(log_config, verbose=args.verbose)
        args._settings = settings
        return args.handler(args)
    except (CliUsageError, ValidationError, FileNotFoundError, KeyError, ValueError) as e:
        message = e.args[0] if isinstance(e, KeyError) and e.args else e
        logger.error(f"{message}")
        print(f"error: {message}", file=sys.stderr)
        return EXIT_USAGE
    except PrecondHQError as e:
        logger.error(f"Solver error: {e.message}")
        print(f"error: {e.message}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
