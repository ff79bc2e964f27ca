"""Command-line entry point: ``python -m src.main``."""
import asyncio
import json
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Optional

import click

from src.algebra.algebraic import parse_point
from src.algebra.polynomials import X, coordinate_index, parse_poly
from src.config import settings
from src.dynamics.classify import classify
from src.dynamics.commute import commuters_up_to, symmetry_group
from src.dynamics.heights import canonical_height, tate_sequence, weil_height
from src.exceptions import DynaHeightError
from src.geometry.signatures import count_signatures, enumerate_signatures
from src.models.reports import ExperimentConfig, Report, RunMode
from src.services.bounds_service import periodic_candidates
from src.services.experiment_service import ExperimentService
from src.utils.emit import emit
from src.utils.log_config import configure_logging
from src.utils.presets import list_presets, load_config, load_preset


def _echo_json(data: Any) -> None:
    click.echo(json.dumps(data, indent=2))


def _parse_range(ctx, param, value: Optional[str]) -> Optional[list[int]]:
    if value is None:
        return None
    lo, sep, hi = value.partition("..")
    try:
        bounds = [int(lo), int(hi if sep else lo)]
    except ValueError:
        raise click.BadParameter("expected LO..HI, e.g. 1..5") from None
    return bounds


def _read_equations(path: Path) -> list[str]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return [line.strip() for line in lines if line.strip() and not line.strip().startswith("#")]


def _infer_n(equations: list[str]) -> int:
    indices = [0]
    for line, text in enumerate(equations, start=1):
        p = parse_poly(text, line=line)
        indices.extend(coordinate_index(g) for g in p.gens if g != X)
    return max(indices)


def _finish(report: Report, fmt: str, output: Optional[Path]) -> None:
    payload = emit(report, fmt)
    if output is not None:
        output.write_bytes(payload)
        click.echo(f"report written to {output} (status {report.status.value})", err=True)
    else:
        click.echo(payload.decode("utf-8"), nl=False)
    if report.message:
        click.echo(report.message, err=True)
    sys.exit(report.exit_code)


def _run_config(ctx, config: ExperimentConfig, fmt: str, output: Optional[Path]) -> None:
    report = asyncio.run(ExperimentService(ctx.obj["jobs"]).run(config))
    _finish(report, fmt, output)


def _guard(func, *args, **kwargs):
    try:
        return func(*args, **kwargs)
    except (DynaHeightError, ValueError) as e:
        raise click.ClickException(str(e))


@contextmanager
def _usage_exits_as_config_error():
    try:
        yield
    except click.UsageError as e:
        # 2 belongs to a violated bound
        e.exit_code = 1
        raise


class DynaHeightGroup(click.Group):
    """Top-level group whose usage errors exit 1, like any other rejected configuration."""

    def make_context(self, *args, **kwargs):
        with _usage_exits_as_config_error():
            return super().make_context(*args, **kwargs)

    def invoke(self, ctx):
        with _usage_exits_as_config_error():
            return super().invoke(ctx)


@click.group(cls=DynaHeightGroup)
@click.option("--jobs", type=int, default=None, help="Worker processes (default: CPU count)")
@click.option("--precision-bits", type=int, default=None, help="Overrides DYNAHEIGHT_PRECISION_BITS")
@click.option("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR")
@click.option("--log-format", type=click.Choice(["json", "text"]), default=None)
@click.pass_context
def main(ctx, jobs, precision_bits, log_level, log_format):
    """Heights, commuting polynomials and bounded-height experiments for diagonal polynomial dynamics."""
    if precision_bits is not None:
        settings.PRECISION_BITS = precision_bits
    try:
        settings.validate()
    except ValueError as e:
        raise click.ClickException(str(e))
    configure_logging(log_level, log_format)
    ctx.ensure_object(dict)
    ctx.obj["jobs"] = jobs


@main.command("classify")
@click.option("--f", "f_text", required=True, help="Polynomial map, e.g. x^3+x")
def classify_command(f_text: str):
    """Decide power, Chebyshev or disintegrated for --f."""
    label = _guard(lambda: classify(parse_poly(f_text)))
    _echo_json(label.to_dict())


@main.group()
def heights():
    """Weil and canonical heights."""


@heights.command("weil")
@click.argument("point")
def heights_weil(point: str):
    """h(POINT); POINT is inf, a rational, or MINPOLY@APPROX."""
    value = _guard(lambda: weil_height(parse_point(point)))
    _echo_json({"point": point, "height": value.to_dict()})


@heights.command("canonical")
@click.option("--f", "f_text", required=True, help="Polynomial map, e.g. x^2+1")
@click.option("--point", required=True, help="inf, a rational, or MINPOLY@APPROX")
@click.option("--err", "target_error", type=float, default=None, help="Target error (default DYNAHEIGHT_TARGET_ERROR)")
def heights_canonical(f_text: str, point: str, target_error: Optional[float]):
    """h_hat_f(--point) to within --err."""
    value = _guard(lambda: canonical_height(parse_poly(f_text), parse_point(point), target_error))
    _echo_json({"f": f_text, "point": point, "canonical_height": value.to_dict()})


@heights.command("tate")
@click.option("--f", "f_text", required=True)
@click.option("--point", required=True)
@click.option("--m", "m", type=int, default=5, show_default=True)
def heights_tate(f_text: str, point: str, m: int):
    """The table of h(f^k(a)) and h(f^k(a))/d^k for k <= m."""
    rows = _guard(lambda: tate_sequence(parse_poly(f_text), parse_point(point), m))
    _echo_json([{"k": k, "height": h.to_dict(), "scaled": s.to_dict()} for k, h, s in rows])


@main.group()
def commute():
    """Linear symmetries and commuting polynomials."""


@commute.command("group")
@click.option("--f", "f_text", required=True)
@click.option("--k-max", type=int, default=None)
def commute_group(f_text: str, k_max: Optional[int]):
    """The cyclic group of linear maps commuting with an iterate of f."""
    group = _guard(lambda: symmetry_group(parse_poly(f_text), k_max))
    _echo_json(group.to_dict())


@commute.command("list")
@click.option("--f", "f_text", required=True)
@click.option("--max-deg", type=int, required=True, help="Largest degree listed")
@click.option("--k-max", type=int, default=None)
def commute_list(f_text: str, max_deg: int, k_max: Optional[int]):
    """Every commuter of degree at most --max-deg with its witness."""
    commuters = _guard(lambda: commuters_up_to(parse_poly(f_text), max_deg, k_max))
    _echo_json([c.to_dict() for c in commuters])


@main.group()
def varieties():
    """Signatures and periodic subvarieties."""


@varieties.command("enumerate")
@click.option("--n", "n", type=int, required=True)
@click.option("--codim", type=int, required=True)
@click.option("--f", "f_text", default=None, help="List the periodic varieties of this map instead of bare signatures")
@click.option("--max-gen-deg", type=int, default=None, help="Largest generator degree (default: deg f)")
@click.option("--k-max", type=int, default=None)
@click.option("--count", "count_only", is_flag=True, help="Print only the number found")
def varieties_enumerate(n: int, codim: int, f_text: Optional[str], max_gen_deg: Optional[int], k_max, count_only: bool):
    """Signatures of codimension --codim in (P^1)^n, or with --f the periodic varieties they carry."""
    if f_text is None:
        if max_gen_deg is not None:
            raise click.UsageError("--max-gen-deg needs --f")
        if count_only:
            _echo_json({"n": n, "codim": codim, "count": _guard(count_signatures, n, codim)})
            return
        _echo_json([s.to_dict() for s in _guard(enumerate_signatures, n, codim)])
        return
    f = _guard(parse_poly, f_text)
    found = _guard(periodic_candidates, f, n, codim, max_gen_deg or f.degree(), k_max)
    if count_only:
        _echo_json({"n": n, "codim": codim, "f": f_text, "count": len(found)})
        return
    _echo_json([V.to_dict() for V in found])


def _output_options(func):
    func = click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json")(func)
    func = click.option("--output", type=click.Path(dir_okay=False, path_type=Path), default=None)(func)
    return func


def _variety_config(mode: RunMode, x_file: Path, f_text: str, n: Optional[int], codim: Optional[int], **extra):
    equations = _guard(_read_equations, x_file)
    n = n or _guard(_infer_n, equations)
    codim = codim if codim is not None else n - len(equations)
    fields = {k: v for k, v in extra.items() if v is not None}
    try:
        return ExperimentConfig(name=f"{mode.value}:{x_file.name}", mode=mode, f=f_text, X=equations, n=n, codim=codim, **fields)
    except ValueError as e:
        raise click.ClickException(str(e))


@main.group()
def bounds():
    """Bounded-height certificates and experiments."""


@bounds.command("certify")
@click.option("--x", "x_file", type=click.Path(exists=True, dir_okay=False, path_type=Path), required=True)
@click.option("--f", "f_text", required=True)
@click.option("--n", "n", type=int, default=None, help="Ambient dimension (default: largest index in X)")
@click.option("--codim", type=int, default=None, help="Dimension of X, the codimension of V")
@click.option("--signature", "signature_json", default=None, help='e.g. {"J_V": [], "chains": [[1, 2]]}')
@click.option("--k-max", type=int, default=None)
@_output_options
@click.pass_context
def bounds_certify(ctx, x_file, f_text, n, codim, signature_json, k_max, fmt, output):
    """c1, c2 and M for X and one signature (every signature when none is given)."""
    signature = json.loads(signature_json) if signature_json else None
    config = _variety_config(RunMode.CERTIFY, x_file, f_text, n, codim, signature=signature, k_max=k_max)
    _run_config(ctx, config, fmt, output)


@bounds.command("verify")
@click.option("--x", "x_file", type=click.Path(exists=True, dir_okay=False, path_type=Path), required=True)
@click.option("--f", "f_text", required=True)
@click.option("--n", "n", type=int, default=None)
@click.option("--codim", type=int, default=None)
@click.option("--max-gen-deg", type=int, default=None)
@click.option("--budget", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--include-large-degree", is_flag=True, default=None)
@_output_options
@click.pass_context
def bounds_verify(ctx, x_file, f_text, n, codim, max_gen_deg, budget, seed, include_large_degree, fmt, output):
    """Sample X cap V for periodic V and check every point against c1."""
    config = _variety_config(
        RunMode.VERIFY,
        x_file,
        f_text,
        n,
        codim,
        max_gen_deg=max_gen_deg,
        budget=budget,
        seed=seed,
        include_large_degree=include_large_degree,
    )
    _run_config(ctx, config, fmt, output)


@bounds.command("structure")
@click.option("--x", "x_file", type=click.Path(exists=True, dir_okay=False, path_type=Path), required=True)
@click.option("--f", "f_text", required=True)
@click.option("--n", "n", type=int, default=None)
@click.option("--codim", type=int, default=None)
@_output_options
@click.pass_context
def bounds_structure(ctx, x_file, f_text, n, codim, fmt, output):
    """The degree bound M and the finite hypersurface collection."""
    config = _variety_config(RunMode.STRUCTURE, x_file, f_text, n, codim)
    _run_config(ctx, config, fmt, output)


@bounds.command("reproduce")
@click.option("--example", "example_id", type=click.Choice(["1", "2"]), required=True)
@click.option("--f", "f_text", required=True)
@click.option("--m", "m_range", callback=_parse_range, default="1..5", show_default=True)
@click.option("--seed-point", default="1", show_default=True)
@_output_options
@click.pass_context
def bounds_reproduce(ctx, example_id, f_text, m_range, seed_point, fmt, output):
    """Heights along the unbounded-height examples, one row per m."""
    try:
        config = ExperimentConfig(
            name=f"reproduce:{example_id}",
            mode=RunMode.REPRODUCE,
            f=f_text,
            example_id=int(example_id),
            m_range=m_range,
            seed_point=seed_point,
        )
    except ValueError as e:
        raise click.ClickException(str(e))
    _run_config(ctx, config, fmt, output)


@main.command("run")
@click.option("--config", "config_path", type=click.Path(dir_okay=False, path_type=Path), default=None)
@click.option("--preset", default=None, help="Name of a bundled preset (see `presets`)")
@click.option("--seed", type=int, default=None)
@click.option("--budget", type=int, default=None)
@click.option("--max-gen-deg", type=int, default=None)
@click.option("--record-timing", is_flag=True, default=None)
@_output_options
@click.pass_context
def run_command(ctx, config_path, preset, seed, budget, max_gen_deg, record_timing, fmt, output):
    """Run a JSON config or a bundled preset; flags override file values."""
    if (config_path is None) == (preset is None):
        raise click.UsageError("give exactly one of --config or --preset")
    overrides = {"seed": seed, "budget": budget, "max_gen_deg": max_gen_deg, "record_timing": record_timing}
    if preset is not None:
        config = _guard(load_preset, preset, overrides)
    else:
        config = _guard(load_config, config_path, overrides)
    _run_config(ctx, config, fmt, output)


@main.command("presets")
def presets_command():
    """List the bundled experiment presets."""
    for name in list_presets():
        click.echo(name)


if __name__ == "__main__":
    main()
