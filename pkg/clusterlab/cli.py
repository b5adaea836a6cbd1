"""clusterlab checks denominator theorems for acyclic cluster algebras.

Quivers are text files with one arrow per line, such as [b]1 -> 2 *2[/b] for a
double arrow. Start with [b]enumerate --quiver a3.q[/b] to list the cluster
variables, then [b]verify denominator --quiver a3.q --all[/b] to run a campaign
over every cluster-tilting object."""

import json
import logging
import sys
from contextlib import contextmanager
from enum import Enum
from pathlib import Path
from typing import Callable, Dict, List, Optional

import typer
from pydantic import ValidationError
from typing_extensions import Annotated

from clusterlab import __version__
from clusterlab.cache import Cache
from clusterlab.clustercat import CObj, ClusterCategory, F_module, parse_label, render_object
from clusterlab.combinatorics import (
    EnumerationBudgetExceeded,
    InternalConsistencyError,
    UnresolvedExchange,
    parse_trace,
)
from clusterlab.config import Config, RunConfig, config_file
from clusterlab.fdalg import CountingPolynomialError, SubmoduleBudgetExceeded
from clusterlab.logging import configure_logging
from clusterlab.reports import (
    CompatibilitySet,
    GrassmannianReport,
    ReportSet,
    character_report,
    grassmannian_entry,
    registry_report,
    summarize,
)
from clusterlab.verify import Lab, compatibility_campaign, run_campaign

app = typer.Typer(rich_markup_mode="rich", help=sys.modules[__name__].__doc__)

logger = logging.getLogger(__name__)


class Campaign(str, Enum):
    denominator = "denominator"
    converse = "converse"
    structure = "structure"
    character = "character"


QuiverOption = Annotated[
    Path,
    typer.Option("--quiver", exists=True, dir_okay=False, readable=True, help="Quiver file"),
]
DepthOption = Annotated[
    Optional[int], typer.Option(help="Mutation depth; required outside Dynkin type")
]
TiltOption = Annotated[
    str, typer.Option(help="Mutation trace of the cluster-tilting object: 'id' or 'mu(1,2)'")
]
PrimesOption = Annotated[
    Optional[str], typer.Option(help="Comma-separated primes for Grassmannian point counts")
]
CapDimOption = Annotated[
    Optional[int], typer.Option(help="Largest module dimension explored outside Dynkin type")
]
CacheDirOption = Annotated[
    Optional[Path],
    typer.Option(envvar="CACHE_DIR", file_okay=False, help="Directory for cached outputs"),
]
OutOption = Annotated[Optional[Path], typer.Option(help="Write JSON here instead of stdout")]
SeedOption = Annotated[int, typer.Option(help="Seed for randomized searches and audits")]
WorkersOption = Annotated[Optional[int], typer.Option(help="Worker threads")]
ObjectOption = Annotated[
    str, typer.Option("--object", help="Object such as 'dim:1,0' or 'sp:2', summands joined by '+'")
]


def version(value: bool):
    if value:
        typer.echo(f"clusterlab v{__version__}")
        raise typer.Exit()


@app.callback()
def callback(
    ctx: typer.Context,
    version: Annotated[
        bool,
        typer.Option(
            "--version",
            help="Show version information for your clusterlab installation",
            callback=version,
        ),
    ] = False,
    debug: bool = False,
    quiet: bool = False,
):
    configure_logging(debug=debug, quiet=quiet)


@contextmanager
def reported_errors():
    """Turn expected failures into a logged message and exit status 1."""
    try:
        yield
    except ValidationError as e:
        for err in e.errors():
            where = ".".join(str(x) for x in err["loc"])
            logger.error(f"{where + ': ' if where else ''}{err['msg']}")
        raise typer.Exit(1)
    except EnumerationBudgetExceeded as e:
        logger.error(f"{e} ({len(e.partial.seeds)} seeds enumerated); raise max_seeds or lower --depth")
        raise typer.Exit(1)
    except SubmoduleBudgetExceeded as e:
        logger.error(f"{e}; raise submodule_budget in the config file")
        raise typer.Exit(1)
    except (UnresolvedExchange, LookupError, ValueError) as e:
        logger.error(str(e))
        raise typer.Exit(1)
    except (InternalConsistencyError, CountingPolynomialError) as e:
        logger.exception(f"Internal error: {e}")
        raise typer.Exit(1)


def _primes(text: Optional[str]) -> Optional[List[int]]:
    if text is None:
        return None
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise typer.BadParameter(f"Cannot read primes from {text!r}") from None


def run_config(command: str, quiver: Path, primes: Optional[str], **options) -> RunConfig:
    return RunConfig.from_options(
        Config.load(), command=command, quiver_path=quiver, primes=_primes(primes), **options
    )


def make_lab(cfg: RunConfig) -> Lab:
    return Lab(
        cfg.quiver,
        depth=cfg.depth,
        cap_dim=cfg.cap_dim,
        primes=cfg.primes,
        seed=cfg.seed,
        workers=cfg.workers,
        max_seeds=cfg.max_seeds,
        budget=cfg.submodule_budget,
    )


def resolve_object(cat: ClusterCategory, text: str) -> CObj:
    return tuple(cat.lookup(parse_label(part, cat.n)) for part in text.split("+"))


def emit(cfg: RunConfig, extra: Dict, produce: Callable[[], str]) -> str:
    """Produce the command's JSON (or fetch it from the cache) and write it out."""
    cache = Cache(cfg.cache_dir) if cfg.cache_dir is not None else None
    inputs = {**cfg.cache_inputs(), **extra}
    text = cache.get(inputs) if cache else None
    if text is None:
        text = produce()
        if cache:
            cache.put(inputs, text)
    if cfg.out is not None:
        cfg.out.parent.mkdir(parents=True, exist_ok=True)
        cfg.out.write_text(text + "\n", encoding="utf-8")
        logger.info(f"Wrote {cfg.out}")
    else:
        typer.echo(text)
    return text


@app.command("enumerate")
def enumerate_seeds(
    quiver: QuiverOption,
    depth: DepthOption = None,
    tilt: Annotated[
        Optional[str],
        typer.Option(help="List variables in the cluster of this seed instead of the initial one"),
    ] = None,
    primes: PrimesOption = None,
    cap_dim: CapDimOption = None,
    cache_dir: CacheDirOption = None,
    out: OutOption = None,
    seed: SeedOption = 0,
    workers: WorkersOption = None,
):
    """Enumerate seeds and cluster variables by mutation, with their cluster-tilting objects."""
    with reported_errors():
        cfg = run_config(
            "enumerate", quiver, primes, depth=depth, tilt=tilt or "id", cap_dim=cap_dim,
            cache_dir=cache_dir, out=out, seed=seed, workers=workers,
        )
        lab = make_lab(cfg)

        def produce() -> str:
            if tilt is None:
                report = registry_report(lab.registry, "u")
            else:
                report = registry_report(lab.x_registry(parse_trace(tilt, lab.quiver.n)), "x")
            return report.model_dump_json(indent=2)

        emit(cfg, {"coordinates": "u" if tilt is None else "x"}, produce)


@app.command()
def verify(
    campaign: Annotated[Campaign, typer.Argument(help="Which campaign to run")],
    quiver: QuiverOption,
    all_: Annotated[
        bool, typer.Option("--all", help="Run at every enumerated cluster-tilting object")
    ] = False,
    depth: DepthOption = None,
    tilt: TiltOption = "id",
    primes: PrimesOption = None,
    cap_dim: CapDimOption = None,
    cache_dir: CacheDirOption = None,
    out: OutOption = None,
    seed: SeedOption = 0,
    workers: WorkersOption = None,
):
    """Run a verification campaign and write its report.

    Exits with status 0 when everything passes, 2 on failures and 3 when the
    only open outcomes are inconclusive or unproven steps."""
    with reported_errors():
        cfg = run_config(
            "verify", quiver, primes, depth=depth, tilt=tilt, cap_dim=cap_dim,
            cache_dir=cache_dir, out=out, seed=seed, workers=workers,
        )
        lab = make_lab(cfg)

        def produce() -> str:
            traces = lab.traces() if all_ else [parse_trace(tilt, lab.quiver.n)]
            reports = run_campaign(lab, campaign.value, traces)
            if all_ or campaign == Campaign.converse:
                bundle = ReportSet(
                    campaign=campaign.value,
                    quiver=lab.quiver.to_text(),
                    depth=lab.depth,
                    reports=reports,
                ).finish()
                return bundle.model_dump_json(indent=2)
            return reports[0].model_dump_json(indent=2)

        text = emit(cfg, {"campaign": campaign.value, "all": all_}, produce)
    verdict = json.loads(text)["summary"]["verdict"]
    raise typer.Exit({"pass": 0, "fail": 2}.get(verdict, 3))


@app.command()
def compat(
    quiver: QuiverOption,
    object_: ObjectOption,
    depth: DepthOption = None,
    tilt: Annotated[
        Optional[str], typer.Option(help="Only the exchange pairs of this seed")
    ] = None,
    cap_dim: CapDimOption = None,
    cache_dir: CacheDirOption = None,
    out: OutOption = None,
    seed: SeedOption = 0,
    workers: WorkersOption = None,
):
    """Check an indecomposable for exchange compatibility against enumerated exchange pairs."""
    with reported_errors():
        cfg = run_config(
            "compat", quiver, None, depth=depth, tilt=tilt or "id", cap_dim=cap_dim,
            cache_dir=cache_dir, out=out, seed=seed, workers=workers,
        )
        lab = make_lab(cfg)

        def produce() -> str:
            obj = resolve_object(lab.category, object_)
            if len(obj) != 1:
                raise ValueError("Compatibility is checked for one indecomposable at a time")
            traces = None if tilt is None else [parse_trace(tilt, lab.quiver.n)]
            records = compatibility_campaign(lab, obj[0], traces)
            return CompatibilitySet(
                quiver=lab.quiver.to_text(),
                depth=lab.depth,
                object=obj[0].label,
                records=records,
                summary=summarize(r.verdict for r in records),
            ).model_dump_json(indent=2)

        text = emit(cfg, {"object": object_, "all_pairs": tilt is None}, produce)
    if json.loads(text)["summary"]["verdict"] == "fail":
        raise typer.Exit(2)


@app.command()
def character(
    quiver: QuiverOption,
    object_: ObjectOption,
    depth: DepthOption = None,
    tilt: TiltOption = "id",
    ledger: Annotated[
        bool, typer.Option(help="Include every (e, chi, exponent) term of the character")
    ] = False,
    primes: PrimesOption = None,
    cap_dim: CapDimOption = None,
    cache_dir: CacheDirOption = None,
    out: OutOption = None,
    seed: SeedOption = 0,
):
    """Compute the cluster character X^T of an object, in the variables x_i of the seed at --tilt."""
    with reported_errors():
        cfg = run_config(
            "character", quiver, primes, depth=depth, tilt=tilt, cap_dim=cap_dim,
            cache_dir=cache_dir, out=out, seed=seed,
        )
        lab = make_lab(cfg)

        def produce() -> str:
            trace = parse_trace(tilt, lab.quiver.n)
            obj = resolve_object(lab.category, object_)
            result = lab.engine(trace).character(obj)
            return character_report(
                lab.quiver.to_text(), tilt, render_object(obj), result, ledger
            ).model_dump_json(indent=2)

        emit(cfg, {"object": object_, "ledger": ledger}, produce)


@app.command()
def grassmannian(
    quiver: QuiverOption,
    object_: ObjectOption,
    depth: DepthOption = None,
    tilt: TiltOption = "id",
    e: Annotated[
        Optional[str], typer.Option(help="A single dimension vector, e.g. '1,0'; all by default")
    ] = None,
    primes: PrimesOption = None,
    cap_dim: CapDimOption = None,
    cache_dir: CacheDirOption = None,
    out: OutOption = None,
    seed: SeedOption = 0,
):
    """Euler characteristics of the quiver Grassmannians of Hom_C(T, M), with the point counts behind them."""
    with reported_errors():
        cfg = run_config(
            "grassmannian", quiver, primes, depth=depth, tilt=tilt, cap_dim=cap_dim,
            cache_dir=cache_dir, out=out, seed=seed,
        )
        lab = make_lab(cfg)

        def produce() -> str:
            obj = resolve_object(lab.category, object_)
            if len(obj) != 1:
                raise ValueError("Grassmannians are computed for one indecomposable at a time")
            engine = lab.engine(parse_trace(tilt, lab.quiver.n))
            X = obj[0]
            if e is None:
                entries = engine.grassmannians(X)
            else:
                entries = [engine.grassmannian(X, [int(x) for x in e.split(",")])]
            return GrassmannianReport(
                quiver=lab.quiver.to_text(),
                trace=tilt,
                object=X.label,
                dims=list(F_module(engine.ctx, [X]).dims),
                grassmannians=[grassmannian_entry(g) for g in entries],
            ).model_dump_json(indent=2)

        emit(cfg, {"object": object_, "e": e}, produce)


@app.command(rich_help_panel="Maintenance")
def config_path():
    """Print the real path to the clusterlab configuration file."""
    if not config_file.exists():
        Config().save()
    typer.echo(config_file.resolve())


@app.command(rich_help_panel="Maintenance")
def purge_cache(cache_dir: CacheDirOption = None):
    """Delete cache entries written by other versions of clusterlab."""
    directory = cache_dir or Config.load().cache_dir
    if directory is None:
        typer.echo("No cache directory configured.")
        raise typer.Exit(1)
    removed = Cache(directory).purge_stale()
    typer.echo(f"Removed {removed} stale cache director{'y' if removed == 1 else 'ies'}.")
