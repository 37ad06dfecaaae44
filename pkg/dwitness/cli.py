import click
from . import __version__
from functools import wraps
from typing import Any, Callable, Dict, List, Optional

AVERAGE_CHOICES = click.Choice(['quenched', 'annealed', 'none'])
ENGINE_CHOICES = click.Choice(['perturbative', 'oracle'])
CHANNEL_CHOICES = click.Choice(['coupling', 'field'])
SEED_TYPE = click.IntRange(0, 2 ** 64 - 1)

def handled(func: Callable[..., Any]) -> Callable[..., Any]:
    """Run a command with warnings echoed to standard error and domain errors mapped to exit codes.

    Domain and file errors exit with code 3, plain value errors become usage errors (exit code 2).
    """
    @wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        import warnings
        from .errors import DisorderWitnessError
        ctx = click.get_current_context()
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter('always')
            try:
                return func(*args, **kwargs)
            except (DisorderWitnessError, OSError) as e:
                _echo_warnings(caught)
                click.echo(f'{type(e).__name__}: {e}', err=True)
                ctx.exit(3)
            except ValueError as e:
                _echo_warnings(caught)
                raise click.UsageError(str(e), ctx=ctx)
            finally:
                _echo_warnings(caught)
    return wrapper

def _echo_warnings(caught: List[Any]) -> None:
    seen = []
    for w in caught:
        line = f'{w.category.__name__}: {w.message}'
        if line not in seen:
            seen.append(line)
            click.echo(line, err=True)
    caught.clear()

def settings() -> Dict[str, Any]:
    """Configuration values with their proper types.

    Returns:
        Dict[str, Any]: Numeric settings, worker count and output home.
    """
    from .utils import get_config, worker_count
    config = get_config()
    return dict(t_min=float(config['t_min']), tol_eps=float(config['tol_eps']), min_grid=int(config['min_grid']),
                grid_factor=float(config['grid_factor']), delta_max=float(config['delta_max']),
                n_jobs=worker_count(config), output_home=str(config['output_home']))

def command_line(ctx: click.Context) -> str:
    """Rebuild the invocation from the parsed options, so that a manifest can be replayed.

    Args:
        ctx (click.Context): Context of the running command.

    Returns:
        str: Command line.
    """
    parts = [ctx.command_path]
    for param in ctx.command.params:
        value = ctx.params.get(param.name)
        if (value is None) or (value is False):
            continue
        parts.append(param.opts[0] if value is True else f'{param.opts[0]} {value}')
    return ' '.join(parts)

def output_prefix(out: str, home: str) -> str:
    import os
    return os.path.join(os.path.expanduser(home), os.path.expanduser(out))

@click.group()
@click.version_option(version=__version__)
def cli() -> None:
    pass

@cli.command()
def config() -> None:
    """Setting defaults for DisorderWitness.
    """
    from .utils import set_config, get_config
    config = get_config()
    new_config = dict()
    print('Setting defaults for DisorderWitness:')
    for k, v in config.items():
        new = input(f'{k} [{v}]: ').strip()
        if new == '':
            new_config[k] = v
        elif k == 'output_home':
            new_config[k] = new
        elif k in ['min_grid', 'threads']:
            new_config[k] = None if new.lower() == 'none' else int(new)
        else:
            new_config[k] = float(new)
    set_config(**new_config)

@cli.command()
@click.option('--J', 'J', type=float, default=1.0, show_default=True, help='Nearest-neighbour coupling.')
@click.option('--B', 'B', type=float, default=0.0, show_default=True, help='Uniform magnetic field.')
@click.option('--T', 'T', type=float, default=0.5, show_default=True, help='Temperature.')
@click.option('--delta', type=float, default=0.0, show_default=True, help='Disorder variance.')
@click.option('--channel', type=CHANNEL_CHOICES, default='coupling', show_default=True, help='Disorder channel.')
@click.option('--average', type=AVERAGE_CHOICES, default='quenched', show_default=True, help='Kind of disorder average.')
@click.option('--engine', type=ENGINE_CHOICES, default='perturbative', show_default=True, help='Thermodynamic-limit formula or finite-chain oracle.')
@click.option('--sites', type=int, default=256, show_default=True, help='Chain length for the oracle.')
@click.option('--samples', type=int, default=400, show_default=True, help='Realizations for the oracle.')
@click.option('--seed', type=SEED_TYPE, default=None, help='Seed, mandatory for the oracle.')
@click.option('--json', 'as_json', is_flag=True, help='Print a single JSON object.')
@click.option('--out', default=None, help='Prefix for <prefix>_witness.json and <prefix>_manifest.json.')
@click.option('--progress', is_flag=True, help='Show a progress bar.')
@handled
def witness(J: float = 1.0, B: float = 0.0, T: float = 0.5, delta: float = 0.0, channel: str = 'coupling',
            average: str = 'quenched', engine: str = 'perturbative', sites: int = 256, samples: int = 400,
            seed: Optional[int] = None, as_json: bool = False, out: Optional[str] = None, progress: bool = False) -> None:
    """Disorder-averaged witness at one (J, B, T).
    """
    import json
    from .Physics.chain import ChainParams, DisorderSpec
    from .Numerics.quadrature import grid_size
    conf = settings()
    params = ChainParams(J=J, B=B, T=T)
    disorder = DisorderSpec(channel, delta)
    record: Dict[str, Any] = dict(engine=engine, **params.to_dict(), delta=delta, channel=channel)
    if engine == 'perturbative':
        from .Witness.perturbative import perturbative_witness
        size = grid_size(params.beta, conf['min_grid'], conf['grid_factor'])
        result = perturbative_witness(params, disorder, average, size=size, tol_eps=conf['tol_eps'],
                                      t_min=conf['t_min'], delta_max=conf['delta_max'])
        record.update(result.to_dict(), grid=size, tol_eps=conf['tol_eps'])
    else:
        from .Oracle.free_fermion import oracle_result
        if seed is None:
            raise click.UsageError('The oracle engine needs an explicit --seed.')
        result, estimate = oracle_result(params, disorder, sites, samples, seed, average, n_jobs=conf['n_jobs'],
                                         progress=progress, t_min=conf['t_min'])
        record.update(result.to_dict(), std_err=estimate.std_err, effective_samples=estimate.effective_samples,
                      abs_mean=estimate.abs_mean, sites=sites, samples=samples, seed=seed)
    record['t_min'] = conf['t_min']
    if as_json:
        click.echo(json.dumps(record))
    else:
        for key in ['signed', 'magnitude', 'clean_part', 'correction_part', 'entangled', 'std_err']:
            if key in record:
                click.echo(f'{key:<16}{record[key]!r}')
    if out is not None:
        from .utils import save_json
        from .IO.records import RunManifest
        prefix = output_prefix(out, conf['output_home'])
        save_json(record, f'{prefix}_witness.json')
        manifest = RunManifest(command_line(click.get_current_context()), record, seed=seed)
        manifest.add_output(f'{prefix}_witness.json')
        manifest.save(f'{prefix}_manifest.json')

@cli.command()
@click.option('--B-min', 'B_min', type=float, default=0.0, show_default=True, help='Smallest field.')
@click.option('--B-max', 'B_max', type=float, default=1.2, show_default=True, help='Largest field.')
@click.option('--T-min', 'T_min', type=float, default=None, help='Smallest temperature. Defaults to the configured t_min.')
@click.option('--T-max', 'T_max', type=float, default=1.5, show_default=True, help='Largest temperature.')
@click.option('--res', type=click.IntRange(16), default=64, show_default=True, help='Points per axis.')
@click.option('--J', 'J', type=float, default=1.0, show_default=True, help='Nearest-neighbour coupling.')
@click.option('--delta', type=float, default=0.0, show_default=True, help='Disorder variance.')
@click.option('--channel', type=CHANNEL_CHOICES, default='coupling', show_default=True, help='Disorder channel.')
@click.option('--average', type=AVERAGE_CHOICES, default='quenched', show_default=True, help='Kind of disorder average.')
@click.option('--engine', type=ENGINE_CHOICES, default='perturbative', show_default=True, help='Thermodynamic-limit formula or finite-chain oracle.')
@click.option('--sites', type=int, default=256, show_default=True, help='Chain length for the oracle.')
@click.option('--samples', type=int, default=400, show_default=True, help='Realizations per cell for the oracle.')
@click.option('--seed', type=SEED_TYPE, default=None, help='Seed, mandatory for the oracle.')
@click.option('--out', required=True, help='Output prefix.')
@click.option('--progress', is_flag=True, help='Show a progress bar.')
@handled
def scan(B_min: float = 0.0, B_max: float = 1.2, T_min: Optional[float] = None, T_max: float = 1.5, res: int = 64,
         J: float = 1.0, delta: float = 0.0, channel: str = 'coupling', average: str = 'quenched',
         engine: str = 'perturbative', sites: int = 256, samples: int = 400, seed: Optional[int] = None,
         out: str = 'scan', progress: bool = False) -> None:
    """Witness over the (B, T) plane, written as grid CSV, boundary CSV and manifest.
    """
    from .Physics.chain import ChainParams, DisorderSpec
    from .Scan import phase_grid
    from .IO.records import write_scan_outputs
    conf = settings()
    if (engine == 'oracle') and (seed is None):
        raise click.UsageError('The oracle engine needs an explicit --seed.')
    T_min = conf['t_min'] if T_min is None else T_min
    g = phase_grid.scan((B_min, B_max), (T_min, T_max), res, ChainParams(J=J), DisorderSpec(channel, delta), average, engine,
                        sites=sites, samples=samples, seed=seed, n_jobs=conf['n_jobs'], progress=progress,
                        tol_eps=conf['tol_eps'], t_min=conf['t_min'], delta_max=conf['delta_max'],
                        min_grid=conf['min_grid'], grid_factor=conf['grid_factor'])
    parameters = dict(J=J, B_range=[B_min, B_max], T_range=[T_min, T_max], delta=delta, channel=channel, average=average,
                      engine=engine, resolution=res, tol_eps=conf['tol_eps'], t_min=conf['t_min'],
                      min_grid=conf['min_grid'], grid_factor=conf['grid_factor'])
    if engine == 'oracle':
        parameters.update(sites=sites, samples=samples)
    manifest = write_scan_outputs(g, output_prefix(out, conf['output_home']), command_line(click.get_current_context()),
                                  parameters, seed=seed)
    for entry in manifest.outputs:
        click.echo(entry['path'])
    click.echo(f'entangled cells {int(g.entangled.sum())}/{g.entangled.size}, boundary segments {g.boundary.shape[0]}')

@cli.command()
@click.option('--quick', is_flag=True, help='Smaller scans and sample counts.')
@click.option('--experiments', is_flag=True, help='Also run the non-gating experiments.')
@click.option('--progress', is_flag=True, help='Show progress bars.')
@handled
def validate(quick: bool = False, experiments: bool = False, progress: bool = False) -> None:
    """Run the validation suite; exit code 1 if any check fails.
    """
    from .Validation.checks import run_checks
    conf = settings()
    report = run_checks(quick=quick, experiments=experiments, n_jobs=conf['n_jobs'], progress=progress, t_min=conf['t_min'])
    for line in report.lines():
        click.echo(line)
    if not report.passed:
        click.get_current_context().exit(1)

def parse_deltas(text: str) -> List[float]:
    try:
        return list(map(float, filter(lambda x: x != '', map(str.strip, text.split(',')))))
    except ValueError:
        raise click.BadParameter(f'"{text}" is not a comma-separated list of numbers.', param_hint='--deltas')

@cli.command()
@click.option('--J', 'J', type=float, default=1.0, show_default=True, help='Nearest-neighbour coupling.')
@click.option('--B', 'B', type=float, default=0.5, show_default=True, help='Uniform magnetic field.')
@click.option('--T', 'T', type=float, default=0.2, show_default=True, help='Temperature.')
@click.option('--deltas', default='1e-4,2e-4,4e-4', show_default=True, help='Comma-separated disorder variances.')
@click.option('--sites', type=int, default=512, show_default=True, help='Chain length.')
@click.option('--samples', type=int, default=2000, show_default=True, help='Realizations per variance.')
@click.option('--seed', type=SEED_TYPE, required=True, help='Run seed.')
@click.option('--average', type=click.Choice(['quenched', 'annealed', 'both']), default='quenched', show_default=True,
              help='Kind of disorder average to check.')
@click.option('--json', 'as_json', is_flag=True, help='Print a single JSON object.')
@click.option('--progress', is_flag=True, help='Show progress bars.')
@handled
def slope(J: float = 1.0, B: float = 0.5, T: float = 0.2, deltas: str = '1e-4,2e-4,4e-4', sites: int = 512,
          samples: int = 2000, seed: int = 0, average: str = 'quenched', as_json: bool = False, progress: bool = False) -> None:
    """Finite-chain slope of the witness in the variance against the first-order prediction.
    """
    import json
    from .Physics.chain import ChainParams
    from .Numerics.quadrature import grid_size
    from .Validation.slope import slope_report
    conf = settings()
    params = ChainParams(J=J, B=B, T=T)
    kinds = ['quenched', 'annealed'] if average == 'both' else [average]
    report = slope_report(params, parse_deltas(deltas), sites=sites, samples=samples, seed=seed, kinds=kinds,
                          n_jobs=conf['n_jobs'], progress=progress,
                          size=grid_size(params.beta, conf['min_grid'], conf['grid_factor']),
                          tol_eps=conf['tol_eps'], t_min=conf['t_min'])
    if as_json:
        click.echo(json.dumps(report.to_dict()))
    else:
        for line in report.lines():
            click.echo(line)
    if not report.passed:
        click.get_current_context().exit(1)

def main() -> None:
    cli()

if __name__ == '__main__':
    main()
