# !/usr/bin/env python3
"""
==============================================================
Description  : 命令行模块 - oned / cell / density / cone / macro / gamma / geometry 子命令
Develop      : VSCode
Author       : sandorn sandorn@live.cn
LastEditTime : 2025-10-17 14:10:00

本模块提供以下核心功能：
- build_argparser：子命令与公共参数（--output、--config、--jobs、--cache-dir、--seed、--log-level）
- RunConfig：命令行参数 + JSON 配置合并后的运行配置，回显到每个输出文件
- main(argv)：分派子命令并返回退出码

退出码：
- 0 成功；2 配置/输入错误（含未知参数）；3 存在未收敛求解；1 审计失败或其他错误
==============================================================
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from xtlog import mylog

from .cache import SolveCache, default_cache_dir
from .cellsolver import CellProblem, SolverParams, solve_cell
from .cones import JumpCone
from .density import (
    DEFAULT_LADDER,
    DensitySweep,
    ProblemTemplate,
    analytic_1d,
    audit_growth,
    audit_shape,
    detect_cones,
    facet_cone,
    recession_ladder,
    sample_density,
    sample_directions,
    sample_strains,
)
from .exception import ConfigError, InputError, MasonryHomError, exit_code_for, report_error
from .executor import default_jobs
from .geometry import parse_geometry, refine_mesh, tile_mesh
from .harness import HARNESS_HEADER, EpsilonExperiment, run_sweep
from .log import set_log_level
from .macroeval import AnalyticDensity1D, CellDensity, DensitySource, MacroField, evaluate
from .tensors import ElasticityOperator, SymTensor, parse_elasticity
from .utils import emit, render_csv, render_json

EXIT_NONCONVERGED = 3

# 子命令的默认选项；JSON 配置覆盖默认值，显式命令行参数覆盖配置
DEFAULTS: dict[str, dict[str, Any]] = {
    'oned': {'geometry': 'chain', 'xi_grid': '-3:0.1:3', 'A': 'identity', 'cone': 'opening', 'refine': 0, 'recession': False},
    'cell': {'geometry': 'chain', 'A': 'identity', 'cone': 'opening', 'xi': '1', 'refine': 0, 'dry': False, 'jumps_csv': None},
    'density': {'geometry': 'stack:1x1', 'A': 'identity', 'cone': 'opening', 'refine': 0, 'samples': 32, 'directions': 0, 'radius': 3.0, 'recession': False, 'pairs': 1000, 'scale': 2.0, 'audit_output': None, 'strict': False},
    'cone': {'geometry': 'stack:1x1', 'A': 'identity', 'cone': 'opening', 'refine': 0, 'directions': 64, 'method': 'sweep'},
    'macro': {'field': None, 'source': 'analytic', 'geometry': 'chain', 'A': 'identity', 'cone': 'opening', 'refine': 0, 'dry': False},
    'gamma': {'geometry': 'chain', 'A': 'identity', 'cone': 'opening', 'refine': 0, 'xi': '2', 'n_ladder': '1,2,4,8', 'boundary': 'periodic'},
    'geometry': {'geometry': 'stack:1x1', 'refine': 0, 'tile': 1},
}
COMMON = ('output', 'jobs', 'cache_dir', 'seed')


@dataclass
class RunConfig:
    """一次运行的完整配置"""

    command: str
    options: dict[str, Any]
    params: SolverParams = field(default_factory=SolverParams)
    output: str | None = None
    jobs: int = 1
    cache_dir: str | None = None
    seed: int = 0

    def __getitem__(self, key: str) -> Any:
        return self.options[key]

    def to_dict(self) -> dict[str, Any]:
        return {'command': self.command, 'options': self.options, 'params': self.params.to_dict(), 'seed': self.seed}

    @classmethod
    def from_namespace(cls, ns: argparse.Namespace) -> RunConfig:
        command = ns.command
        config = _load_config(ns.config) if getattr(ns, 'config', None) else {}
        params_data = config.pop('params', {})
        if not isinstance(params_data, dict):
            raise ConfigError('config "params" must be a JSON object')
        unknown = sorted(set(config) - set(DEFAULTS[command]) - set(COMMON))
        if unknown:
            raise ConfigError(f'unknown {command} config keys: {unknown}')
        explicit = {k: v for k, v in vars(ns).items() if v is not None and k in DEFAULTS[command]}
        options = {**DEFAULTS[command], **{k: v for k, v in config.items() if k in DEFAULTS[command]}, **explicit}
        common = {k: config.get(k) for k in COMMON}
        common.update({k: getattr(ns, k) for k in COMMON if getattr(ns, k, None) is not None})
        jobs = int(common['jobs']) if common['jobs'] is not None else default_jobs()
        return cls(
            command=command,
            options=options,
            params=SolverParams.from_dict(params_data),
            output=common['output'],
            jobs=jobs,
            cache_dir=common['cache_dir'],
            seed=int(common['seed'] or 0),
        )

    def cache(self) -> SolveCache:
        return SolveCache(cache_dir=self.cache_dir or default_cache_dir())


def _load_config(path: str) -> dict[str, Any]:
    try:
        data = json.loads(Path(path).read_text(encoding='utf-8'))
    except OSError as err:
        raise ConfigError(f'cannot read config {path}: {err}') from err
    except json.JSONDecodeError as err:
        raise ConfigError(f'invalid JSON in {path}: {err}') from err
    if not isinstance(data, dict):
        raise ConfigError(f'config {path} must hold a JSON object')
    return data


# ---------------------------------------------------------------- option parsing


def parse_grid(text: str) -> list[float]:
    """'a:step:b' → [a, a+step, ..., b]（含端点）"""
    try:
        a, step, b = (float(v) for v in str(text).split(':'))
    except ValueError as err:
        raise InputError(f'grid must look like a:step:b, got {text!r}') from err
    if step <= 0 or b < a:
        raise InputError(f'grid needs step > 0 and b >= a, got {text!r}')
    count = int(math.floor((b - a) / step + 1e-9)) + 1
    return [round(a + i * step, 12) for i in range(count)]


def parse_xi(value: Any, dim: int) -> SymTensor:
    """'2'、'1,0,0'（ξ11, ξ22, ξ12）、标量或矩阵"""
    if isinstance(value, str):
        try:
            parts = [float(v) for v in value.split(',')]
        except ValueError as err:
            raise InputError(f'cannot parse xi {value!r}') from err
        if len(parts) == 1 and dim == 1:
            return SymTensor.from_entries(parts[0])
        if len(parts) == 3 and dim == 2:
            return SymTensor.from_entries(parts[0], parts[1], parts[2])
        raise InputError(f'xi {value!r} does not fit a {dim}D geometry (give 1 value in 1D, xi11,xi22,xi12 in 2D)')
    xi = SymTensor.from_dict(value)
    if xi.dim != dim:
        raise InputError(f'xi is {xi.dim}D but the geometry is {dim}D')
    return xi


def _elasticity(value: Any, dim: int) -> ElasticityOperator:
    if isinstance(value, str):
        return parse_elasticity(value, dim)
    if isinstance(value, dict):
        return ElasticityOperator.from_dict(value)
    return ElasticityOperator.from_matrix(value)


def _template(cfg: RunConfig) -> ProblemTemplate:
    mesh = parse_geometry(cfg['geometry'])
    if cfg['refine']:
        mesh = refine_mesh(mesh, int(cfg['refine']))
    cone = cfg['cone']
    jump_cone = JumpCone.parse(cone, mesh.dim) if isinstance(cone, str) else JumpCone.from_dict(cone, mesh.dim)
    return ProblemTemplate(mesh, _elasticity(cfg['A'], mesh.dim), jump_cone, cfg.params)


def _int_list(text: Any) -> tuple[int, ...]:
    if isinstance(text, (list, tuple)):
        return tuple(int(v) for v in text)
    try:
        return tuple(int(v) for v in str(text).split(','))
    except ValueError as err:
        raise InputError(f'expected a comma-separated integer list, got {text!r}') from err


def _sibling(output: str | None, suffix: str) -> str | None:
    if output is None or output == '-':
        return None
    path = Path(output)
    return str(path.with_name(f'{path.stem}{suffix}'))


# ---------------------------------------------------------------- subcommands


def cmd_oned(cfg: RunConfig) -> int:
    template = _template(cfg)
    if template.dim != 1:
        raise InputError('oned needs a 1D geometry')
    sweep = DensitySweep(template, cfg.cache(), cfg.jobs)
    grid = parse_grid(cfg['xi_grid'])
    xis = [SymTensor.from_entries(x) for x in grid]
    solutions = sweep.solve_many(xis)
    header = ['xi', 'f_analytic', 'f_solver', 'abs_err']
    if cfg['recession']:
        header += ['recession_analytic', 'recession_solver']
    rows = []
    for x, sol in zip(grid, solutions, strict=True):
        f_exact, rec_exact = analytic_1d(x)
        row: list[Any] = [x, f_exact, sol.value, abs(sol.value - f_exact)]
        if cfg['recession']:
            rec = recession_ladder(sweep, SymTensor.from_entries(math.copysign(1.0, x)), DEFAULT_LADDER).value * abs(x) if x != 0 else 0.0
            row += [rec_exact, rec]
        rows.append(row)
    emit(render_csv(header, rows, cfg.to_dict()), cfg.output)
    worst = max(r[3] for r in rows) if rows else 0.0
    mylog.success(f'oned | {len(rows)} points, max abs error {worst:.3e}')
    return 0 if sweep.all_converged else EXIT_NONCONVERGED


def cmd_cell(cfg: RunConfig) -> int:
    template = _template(cfg)
    xi = parse_xi(cfg['xi'], template.dim)
    problem: CellProblem = template.problem(xi, include_surface=not cfg['dry'])
    solution = solve_cell(problem)
    payload = {'problem': problem.to_dict(), 'solution': solution.to_dict(timing=False)}
    emit(render_json(payload, cfg.to_dict()), cfg.output)
    if cfg['jumps_csv']:
        dim = template.dim
        axes = ['x', 'y'][:dim]
        header = ['facet', *axes, 'weight', *[f'n{a}' for a in axes], *[f'j{a}' for a in axes]]
        emit(render_csv(header, solution.jump_rows(template.mesh), cfg.to_dict()), cfg['jumps_csv'])
    return 0 if solution.converged else EXIT_NONCONVERGED


def cmd_density(cfg: RunConfig) -> int:
    template = _template(cfg)
    sweep = DensitySweep(template, cfg.cache(), cfg.jobs)
    xis = sample_strains(template.dim, int(cfg['samples']), float(cfg['radius']), cfg.seed)
    if cfg['directions']:
        xis += sample_directions(template.dim, int(cfg['directions']), seed=cfg.seed)
    samples = sample_density(sweep, xis, recession=bool(cfg['recession']))
    axes = ['xi'] if template.dim == 1 else ['xi11', 'xi22', 'xi12_voigt']
    header = [*axes, 'f', 'g', 'recession', 'class', 'converged']
    emit(render_csv(header, [s.row() for s in samples], cfg.to_dict()), cfg.output)

    audit = audit_growth(samples, template.A, facet_cone(template.mesh, template.cone))
    shape = audit_shape(sweep, samples, int(cfg['pairs']), float(cfg['scale']), cfg.seed)
    audit_path = cfg['audit_output'] or _sibling(cfg.output, '.audit.json')
    report = {**audit.to_dict(), 'passed': audit.passed and shape.passed, 'shape': shape.to_dict()}
    if audit_path:
        emit(render_json(report, cfg.to_dict()), audit_path)
    else:
        mylog.info(f'density | audit: passed={report["passed"]} worst lower margin={audit.worst_lower_margin:.3e} worst upper margin={audit.worst_upper_margin:.3e}')
        mylog.info(f'density | shape: {shape.pairs_checked} midpoint pairs, worst excess={shape.worst_convexity_excess:.3e}; {shape.homogeneity_checked} rays, worst relative error={shape.worst_homogeneity_error:.3e}')
    if cfg['strict']:
        audit.raise_for_failures()
        shape.raise_for_failures()
    return 0 if sweep.all_converged else EXIT_NONCONVERGED


def cmd_cone(cfg: RunConfig) -> int:
    template = _template(cfg)
    sweep = DensitySweep(template, cfg.cache(), cfg.jobs)
    directions = sample_directions(template.dim, int(cfg['directions']), cfg['method'], cfg.seed)
    detection = detect_cones(sweep, directions)
    emit(render_json(detection.to_dict(), cfg.to_dict()), cfg.output)
    return 0 if sweep.all_converged else EXIT_NONCONVERGED


def cmd_macro(cfg: RunConfig) -> int:
    spec = cfg['field']
    if spec is None:
        raise ConfigError('macro needs a field description (--field path or "field" in the config)')
    data = _load_config(spec) if isinstance(spec, str) else spec
    macro = MacroField.from_dict(data)
    source: DensitySource
    sweep = None
    if cfg['source'] == 'analytic':
        if macro.dim != 1:
            raise InputError('the analytic density source is one-dimensional')
        source = AnalyticDensity1D()
    elif cfg['source'] == 'cell':
        sweep = DensitySweep(_template(cfg), cfg.cache(), cfg.jobs)
        source = CellDensity(sweep)
    else:
        raise InputError(f'unknown density source {cfg["source"]!r} (expected analytic or cell)')
    energy = evaluate(macro, source, dry=bool(cfg['dry']))
    emit(render_json(energy.to_dict(), cfg.to_dict()), cfg.output)
    return 0 if sweep is None or sweep.all_converged else EXIT_NONCONVERGED


def cmd_gamma(cfg: RunConfig) -> int:
    template = _template(cfg)
    experiment = EpsilonExperiment(template, parse_xi(cfg['xi'], template.dim), _int_list(cfg['n_ladder']), cfg['boundary'])
    result = run_sweep(experiment, cfg.cache(), cfg.jobs)
    emit(render_csv(HARNESS_HEADER, [r.row() for r in result.rows], {**cfg.to_dict(), 'f_hom': result.f_hom}), cfg.output)
    mylog.success(f'gamma | f_hom={result.f_hom:.9g} last-two difference={result.last_two_difference:.3e}')
    return 0 if result.all_converged else EXIT_NONCONVERGED


def cmd_geometry(cfg: RunConfig) -> int:
    mesh = parse_geometry(cfg['geometry'])
    if cfg['refine']:
        mesh = refine_mesh(mesh, int(cfg['refine']))
    if int(cfg['tile']) > 1:
        mesh = tile_mesh(mesh, int(cfg['tile']))
    emit(render_json({'mesh': mesh.to_dict(), 'fingerprint': mesh.fingerprint}, cfg.to_dict()), cfg.output)
    return 0


COMMANDS: dict[str, Callable[[RunConfig], int]] = {
    'oned': cmd_oned,
    'cell': cmd_cell,
    'density': cmd_density,
    'cone': cmd_cone,
    'macro': cmd_macro,
    'gamma': cmd_gamma,
    'geometry': cmd_geometry,
}


# ---------------------------------------------------------------- parser


def _add_common(ap: argparse.ArgumentParser) -> None:
    ap.add_argument('--config', help='JSON configuration file (keys as the long options, plus "params")')
    ap.add_argument('--output', '-o', help='output file (stdout when omitted)')
    ap.add_argument('--jobs', type=int, help='parallel cell solves (default: $MASONRYHOM_JOBS or 1)')
    ap.add_argument('--cache-dir', dest='cache_dir', help='on-disk solve cache (default: $MASONRYHOM_CACHE_DIR)')
    ap.add_argument('--seed', type=int, help='seed for sampled strains and Sobol directions')


def _add_problem(ap: argparse.ArgumentParser) -> None:
    ap.add_argument('--geometry', help='chain[:n], stack:<nx>x<ny> or running:<nx>x<ny>:<offset>')
    ap.add_argument('--A', dest='A', help='identity, scaled:<s> or iso:<lambda>,<mu>')
    ap.add_argument('--cone', help='opening or noninterpenetration (alias detachment)')
    ap.add_argument('--refine', type=int, help='block refinement level')


def build_argparser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog='masonryhom', description='Homogenization toolkit for cohesive masonry-like block assemblies')
    ap.add_argument('--log-level', dest='log_level', default='INFO', help='DEBUG, INFO, WARNING or ERROR')
    sub = ap.add_subparsers(dest='command', required=True)

    p = sub.add_parser('oned', help='1D chain: solver density against the closed form')
    _add_common(p)
    _add_problem(p)
    p.add_argument('--xi-grid', dest='xi_grid', help='a:step:b (default -3:0.1:3)')
    p.add_argument('--recession', action='store_true', default=None, help='add analytic and estimated recession columns')

    p = sub.add_parser('cell', help='solve one cell problem')
    _add_common(p)
    _add_problem(p)
    p.add_argument('--xi', help='macroscopic strain: "xi" in 1D, "xi11,xi22,xi12" in 2D')
    p.add_argument('--dry', action='store_true', default=None, help='drop the surface term (g_hom)')
    p.add_argument('--jumps-csv', dest='jumps_csv', help='write per-quadrature-point jumps as CSV')

    p = sub.add_parser('density', help='sampled f_hom / g_hom with growth, convexity and homogeneity audits')
    _add_common(p)
    _add_problem(p)
    p.add_argument('--samples', type=int, help='random strains in the ball of radius --radius')
    p.add_argument('--directions', type=int, help='add deterministic unit directions')
    p.add_argument('--radius', type=float)
    p.add_argument('--recession', action='store_true', default=None, help='estimate the recession function per sample')
    p.add_argument('--pairs', type=int, help='random sample pairs for the midpoint convexity check of f_hom')
    p.add_argument('--scale', type=float, help='ray factor t for the check g_hom(t xi) = t^2 g_hom(xi)')
    p.add_argument('--audit-output', dest='audit_output', help='audit report JSON (default: <output>.audit.json)')
    p.add_argument('--strict', action='store_true', default=None, help='exit 1 when the audit fails')

    p = sub.add_parser('cone', help='detect H_hom and K_hom')
    _add_common(p)
    _add_problem(p)
    p.add_argument('--directions', type=int)
    p.add_argument('--method', choices=['sweep', 'sobol'])

    p = sub.add_parser('macro', help='evaluate the homogenized functional on a macroscopic field')
    _add_common(p)
    _add_problem(p)
    p.add_argument('--field', help='JSON field description')
    p.add_argument('--source', choices=['analytic', 'cell'])
    p.add_argument('--dry', action='store_true', default=None, help='dry-masonry functional')

    p = sub.add_parser('gamma', help='epsilon-sequence experiment')
    _add_common(p)
    _add_problem(p)
    p.add_argument('--xi')
    p.add_argument('--n-ladder', dest='n_ladder', help='comma-separated N values')
    p.add_argument('--boundary', choices=['periodic', 'clamp'])

    p = sub.add_parser('geometry', help='write a mesh as JSON')
    _add_common(p)
    p.add_argument('--geometry')
    p.add_argument('--refine', type=int)
    p.add_argument('--tile', type=int)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_argparser()
    try:
        ns = ap.parse_args(list(argv) if argv is not None else None)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        set_log_level(ns.log_level)
        cfg = RunConfig.from_namespace(ns)
        code = COMMANDS[cfg.command](cfg)
    except MasonryHomError as err:
        report_error(err, f'masonryhom {ns.command}')
        print(f'error: {err}', file=sys.stderr)
        return exit_code_for(err)
    if code == EXIT_NONCONVERGED:
        mylog.warning(f'masonryhom {ns.command} | some cell solves did not converge')
    return code


__all__ = ['EXIT_NONCONVERGED', 'RunConfig', 'build_argparser', 'main', 'parse_grid', 'parse_xi']
