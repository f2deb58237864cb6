"""
Main Entry Point

Reproduction sweeps, optimizer runs, oracle validation, link database
operations and the VGNCF lifecycle demo.

Author: VGNCF Toolkit
Date: 2026-10-19
"""

import sys
import logging
import argparse
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np
import pandas as pd
from dateutil.parser import isoparse

# Add src to path
sys.path.insert(0, str(Path(__file__).parent))

from config import (
    VERSION, LOG_FILE, LOG_LEVEL, OUTPUT_DIR, SAMPLE_TOPOLOGY, DEFAULT_SEED, WORKERS,
    LINKDB_PATH, DEFAULT_K, DEFAULT_L, DEFAULT_Q, DEFAULT_RHO0, DEFAULT_ETA0,
    RATE_WINDOW, GRID_MAX_DELTA, GRID_STEP, BETA0_VERY_LOW, BETA0_LOW, BETA0_HIGH, BETA0_LEVELS,
    SWEEP_DELTAS, SWEEP_RHO0, SWEEP_H_MAX, CONNECTIVITY_H_LIMIT, TERNARY_AUDIT_POINTS,
    EWMA_ALPHA, MC_TRIALS, ORACLE_Z, VALIDATION_GRID, DEFAULT_RESOURCE_UNITS,
)
from src.analytics.erasure_analytics import PathProfile, hop_reliability
from src.analytics.rate_region import GridSpec, evaluate_cell, rate_region_grid, summarize_region
from src.coding.models import SUPPORTED_Q, CodeParams
from src.coding.snc_codec import PartialPolicy
from src.complexity.complexity_model import ComplexityBudget, max_n_under_budget, roles_for_path
from src.lifecycle.catalogues import Catalogues, NsDescriptor, VgncfDescriptor
from src.lifecycle.controller import Decision, VgncfController
from src.lifecycle.state_machine import EventType, VgncfStateMachine
from src.optimizer.connectivity import SelectionMode, connectivity_gain, reliability_gain_sweep, sweep_frame
from src.optimizer.utility_optimizer import RangePolicy, operative_range, optimize_rate
from src.reporting.exporters import (
    RunManifest, manifest_path, save_to_csv, save_to_json, save_to_jsonl,
)
from src.simulation.mc_oracle import SimEngine, validate_grid
from src.storage.database import IN_MEMORY, GeoLinkDatabase
from src.storage.models import LinkObservation, Role

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_BAD_INPUT = 2

# Fixed start of the lifecycle demo's monitoring clock
DEMO_EPOCH = datetime(2026, 10, 1, 8, 0, tzinfo=timezone.utc)


def setup_logging():
    """Log to file and stdout."""
    Path(LOG_FILE).parent.mkdir(parents=True, exist_ok=True)
    logging.basicConfig(
        level=getattr(logging, LOG_LEVEL),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[
            logging.FileHandler(LOG_FILE, encoding='utf-8'),
            logging.StreamHandler(sys.stdout)
        ]
    )


# Output helpers

def _params(args: argparse.Namespace) -> Dict:
    return {key: value for key, value in sorted(vars(args).items()) if key not in ('func', 'command')}


def _output(args: argparse.Namespace, name: str, ext: str) -> str:
    return str(Path(args.out) / f"{name}.{ext}")


def _write_manifest(args: argparse.Namespace, output_file: str):
    RunManifest(subcommand=args.command, params=_params(args), seed=args.seed,
                version=VERSION, outputs=[output_file]).write(manifest_path(output_file))


def _write_table(args: argparse.Namespace, name: str, df: pd.DataFrame) -> str:
    if args.format == 'csv':
        output_file = save_to_csv(df, _output(args, name, 'csv'))
    else:
        records = df.astype(object).where(df.notna(), None).to_dict(orient='records')
        output_file = save_to_json(records, _output(args, name, 'json'))
    _write_manifest(args, output_file)
    return output_file


def _write_json(args: argparse.Namespace, name: str, data) -> str:
    output_file = save_to_json(data, _output(args, name, 'json'))
    _write_manifest(args, output_file)
    return output_file


def _report_checks(checks: Dict[str, bool]) -> int:
    for name, passed in checks.items():
        if passed:
            logger.info(f"Check {name}: ok")
        else:
            logger.warning(f"Check {name}: FAILED")
    return EXIT_OK if all(checks.values()) else EXIT_VALIDATION


def build_budget(args: argparse.Namespace, beta0_source: float) -> ComplexityBudget:
    """Source-only scope leaves relays and destinations unconstrained."""
    if args.budget_scope == 'source':
        return ComplexityBudget.source_only(beta0_source)
    relay = args.beta0_relay if args.beta0_relay is not None else beta0_source
    dest = args.beta0_dest if args.beta0_dest is not None else beta0_source
    return ComplexityBudget(beta0_source, relay, dest)


def _symbols(args: argparse.Namespace) -> int:
    if (8 * args.L) % args.q:
        raise ValueError(f"L={args.L} bytes is not a whole number of GF(2^{args.q}) symbols")
    return 8 * args.L // args.q


# Commands

def cmd_rate_region(args: argparse.Namespace) -> int:
    """Two-hop rate region grids with and without relay re-encoding."""
    if args.defaults:
        args.k, args.q, args.eta0 = DEFAULT_K, DEFAULT_Q, DEFAULT_ETA0
        args.rate_min, args.rate_max = RATE_WINDOW
        args.grid_step, args.max_delta = GRID_STEP, GRID_MAX_DELTA
        args.delta = args.delta2 = None

    window = (args.rate_min, args.rate_max)
    if args.delta is not None or args.delta2 is not None:
        return _rate_region_point(args, window)

    grid = GridSpec(max_delta=args.max_delta, step=args.grid_step)
    nc = rate_region_grid('nc', args.k, args.q, args.eta0, window, grid)
    e2e = rate_region_grid('e2e', args.k, args.q, args.eta0, window, grid)

    _write_table(args, 'rate_region_nc', nc.to_frame())
    _write_table(args, 'rate_region_e2e', e2e.to_frame())

    nc_summary = summarize_region(nc, baseline=e2e)
    e2e_summary = summarize_region(e2e)
    _write_json(args, 'rate_region_summary', {'nc': nc_summary.to_dict(), 'e2e': e2e_summary.to_dict()})
    logger.info(f"Feasible cells: NC {nc_summary.feasible_cells}, e2e {e2e_summary.feasible_cells}, "
                f"area ratio {nc_summary.area_ratio}")
    if nc_summary.product_mismatch_cells:
        logger.info(f"NC cells outside the product set: {nc_summary.product_mismatch_cells}")

    checks = {
        'symmetric': nc_summary.symmetric and e2e_summary.symmetric,
        'nc_contains_e2e': bool(np.all(e2e.feasible_mask() <= nc.feasible_mask())),
    }
    if args.defaults:
        # eta^NC couples both links through the shared n, so only corner cells may drop out
        checks['nc_product_set'] = nc_summary.mismatches_on_edge
        checks['e2e_curved'] = e2e_summary.rectangularity < 0.9
        checks['area_ratio'] = (nc_summary.area_ratio or 0) >= 1.5
    return _report_checks(checks)


def _rate_region_point(args: argparse.Namespace, window) -> int:
    """Both schemes at the single cell (--delta, --delta2)."""
    if args.delta is None:
        raise ValueError("--delta2 needs --delta for the first link")
    delta2 = args.delta if args.delta2 is None else args.delta2
    cells = {scheme: evaluate_cell(scheme, args.k, args.delta, delta2, args.q, args.eta0, window)
             for scheme in ('nc', 'e2e')}
    _write_json(args, 'rate_region_point', {
        'delta1': args.delta,
        'delta2': delta2,
        **{scheme: dict(cell.__dict__) for scheme, cell in cells.items()},
    })
    for scheme, cell in cells.items():
        logger.info(f"{scheme} at ({args.delta}, {delta2}): feasible={cell.feasible}, r={cell.best_r}")
    return EXIT_OK


def cmd_reliability(args: argparse.Namespace) -> int:
    """Reliability gain of the optimized code over no coding along growing paths."""
    if args.defaults:
        args.k, args.L, args.q, args.rho0 = DEFAULT_K, DEFAULT_L, DEFAULT_Q, DEFAULT_RHO0
        args.delta, args.beta0_source = list(SWEEP_DELTAS), [BETA0_LOW, BETA0_HIGH]
        args.hops, args.delta2 = SWEEP_H_MAX, None

    s = _symbols(args)
    frames = []
    reach = {}
    for delta in args.delta:
        for beta0 in args.beta0_source:
            records = reliability_gain_sweep(args.k, s, args.q, delta, args.rho0,
                                             build_budget(args, beta0), args.hops, args.mode,
                                             delta2=args.delta2)
            frames.append(sweep_frame(records))
            meeting = [r.h for r in records if r.rho_nc >= args.rho0]
            reach[(delta, beta0)] = max(meeting) if meeting else 0
            logger.info(f"delta={delta}, beta0={beta0:g}: target met up to h={reach[(delta, beta0)]}")

    _write_table(args, 'reliability_gain', pd.concat(frames, ignore_index=True))

    checks = {}
    if args.defaults:
        checks['delta_0.1_high_all_hops'] = reach.get((0.1, BETA0_HIGH)) == args.hops
        checks['delta_0.15_high_about_10_hops'] = 7 <= reach.get((0.15, BETA0_HIGH), 0) <= 13
    return _report_checks(checks)


def cmd_connectivity(args: argparse.Namespace) -> int:
    """Connectivity gain table over budgets, erasure rates and targets."""
    if args.defaults:
        args.k, args.L, args.q = DEFAULT_K, DEFAULT_L, DEFAULT_Q
        args.delta, args.rho0 = list(SWEEP_DELTAS), list(SWEEP_RHO0)
        args.beta0_source = [BETA0_VERY_LOW, BETA0_LOW, BETA0_HIGH]

    s = _symbols(args)
    rows = []
    for beta0 in args.beta0_source:
        for delta in args.delta:
            for rho0 in args.rho0:
                result = connectivity_gain(args.k, s, args.q, delta, rho0, build_budget(args, beta0),
                                           args.mode, h_limit=args.h_limit)
                rows.append({'beta0': beta0, **result.to_dict()})
    table = pd.DataFrame(rows, columns=['beta0', 'delta', 'rho0', 'h_nc', 'h_unc', 'gamma',
                                        'n_at_reach', 'reason', 'h_nc_capped', 'h_unc_capped'])
    _write_table(args, 'connectivity', table)

    violations = _monotonicity_violations(rows)
    for violation in violations:
        logger.warning(f"Monotonicity violated: {violation}")
    checks = {'monotone': not violations}
    if args.defaults:
        gamma = {(r['beta0'], r['delta'], r['rho0']): r['gamma'] for r in rows}
        checks['gamma_0.1_0.8_high'] = (gamma.get((BETA0_HIGH, 0.1, 0.8)) or 0) >= 100
        checks['gamma_0.15_0.8_high'] = 4 <= (gamma.get((BETA0_HIGH, 0.15, 0.8)) or 0) <= 30
    return _report_checks(checks)


def _monotonicity_violations(rows: List[Dict]) -> List[str]:
    """gamma must not fall as the budget grows nor rise as links get worse."""
    violations = []
    defined = [r for r in rows if r['gamma'] is not None]
    for a in defined:
        for b in defined:
            if a['rho0'] != b['rho0']:
                continue
            if a['delta'] == b['delta'] and a['beta0'] < b['beta0'] and a['gamma'] > b['gamma']:
                violations.append(f"beta0 {a['beta0']:g} -> {b['beta0']:g} at delta={a['delta']}, rho0={a['rho0']}")
            if a['beta0'] == b['beta0'] and a['delta'] < b['delta'] and a['gamma'] < b['gamma']:
                violations.append(f"delta {a['delta']} -> {b['delta']} at beta0={a['beta0']:g}, rho0={a['rho0']}")
    return violations


def _parse_code(text: str):
    try:
        k, n = (int(part) for part in text.split(','))
    except ValueError:
        raise ValueError(f"Code must be given as k,n; got {text!r}")
    return k, n


def cmd_validate(args: argparse.Namespace) -> int:
    """Monte-Carlo check of the analytic reliability over a grid of codes."""
    codes = [_parse_code(code) for code in args.code]
    rows = validate_grid(codes, args.delta, args.hops, args.trials, args.seed, q=args.q, z=args.z,
                         partial_policy=args.partial_policy, workers=args.workers,
                         perturb=args.perturb, engine=args.engine)
    _write_table(args, 'validation', pd.DataFrame([row.__dict__ for row in rows]))

    failed = [row for row in rows if not row.passed]
    logger.info(f"Oracle comparison: {len(rows) - len(failed)}/{len(rows)} passed")
    return EXIT_VALIDATION if failed else EXIT_OK


def _read_topology(args: argparse.Namespace) -> GeoLinkDatabase:
    with open(args.topology, 'r', encoding='utf-8') as f:
        text = f.read()
    return GeoLinkDatabase(args.db, alpha=args.alpha).ingest(text)


def _single(db: GeoLinkDatabase, role: Role) -> str:
    nodes = db.nodes_by_role(role)
    if not nodes:
        raise ValueError(f"Topology has no {role.value} node")
    return nodes[0].id


def cmd_lifecycle_demo(args: argparse.Namespace) -> int:
    """Instantiate, monitor through a loss spike, and terminate a VGNCF instance."""
    db = _read_topology(args)
    source, sink = _single(db, Role.SOURCE), _single(db, Role.SINK)

    catalogues = Catalogues()
    catalogues.register_ns(NsDescriptor('ns-1', source, sink, geo_ref=args.topology))
    catalogues.register_vnf(VgncfDescriptor('vgncf', k=args.k, L=args.L, q=args.q, rho0=args.rho0,
                                            resource_units=args.resource_units))
    machine = VgncfStateMachine('vgncf-1', catalogues, 'ns-1', 'vgncf')
    controller = VgncfController(machine, db, build_budget(args, args.beta0_source[0]))

    result = controller.instantiate()
    if not result.accepted:
        raise ValueError(f"Instantiation rejected: {result.diagnostic}")
    controller.send(EventType.RESOURCE_REPORT, units=catalogues.allocation('vgncf-1'))
    logger.info(f"Active with n={controller.n}")

    route = db.extract_path(source, sink, nc_only=True)
    for tick, loss in enumerate([None, args.spike]):
        observations = []
        for link_label, delta in zip(route.profile.labels, route.profile.deltas):
            src, dst = link_label.split('->')
            rate = delta if loss is None else loss
            observations.append(LinkObservation(src, dst, sent=args.sent, lost=round(rate * args.sent),
                                                timestamp=DEMO_EPOCH + timedelta(minutes=tick)))
        controller.monitoring_tick(observations)

    controller.terminate()

    events = _output(args, 'lifecycle_events', 'jsonl')
    save_to_jsonl((record.to_dict() for record in machine.history), events)
    _write_manifest(args, events)
    _write_json(args, 'lifecycle_decisions', [d.to_dict() for d in controller.decisions])

    recodes = sum(1 for d in controller.decisions if d.decision == Decision.RECODE)
    logger.info(f"Lifecycle demo: {len(machine.history)} phases, {recodes} recode decision(s), "
                f"final state {machine.state.value}")
    return EXIT_OK


def cmd_optimize(args: argparse.Namespace) -> int:
    """Single optimizer run with the operative range."""
    s = _symbols(args)
    deltas = list(args.delta) if len(args.delta) > 1 else args.delta * args.hops
    if args.delta2 is not None:
        if len(deltas) < 2:
            raise ValueError("--delta2 sets the second link, but the path has one hop")
        deltas[1] = args.delta2
    path = PathProfile(deltas=tuple(deltas))
    budget = build_budget(args, args.beta0_source[0])

    point = optimize_rate(args.k, s, args.q, path, args.rho0, budget, exhaustive=args.exhaustive,
                          audit_points=args.audit_points)
    operative = operative_range(args.k, s, args.q, path, args.rho0, budget,
                                policy=args.policy, u_floor=args.u_floor)
    limits = max_n_under_budget(args.k, s, args.q, budget, roles_for_path(path.hops))
    profile = hop_reliability(CodeParams(k=args.k, n=point.n, q=args.q, L=args.L), path)

    _write_json(args, 'optimize', {
        'argmax': point.to_dict(),
        'n_max': {'per_role': {role.value: n for role, n in limits.per_role.items()},
                  'overall': limits.overall},
        'operative_range': {
            'activate': operative.activate,
            'policy': operative.policy.value,
            'u_min': operative.u_min,
            'u_max': operative.u_max,
            'n': [p.n for p in operative.points],
        },
        'hop_profile': profile,
    })
    logger.info(f"Argmax n={point.n} (r={point.r:.4f}), utility={point.utility}, "
                f"reliability={point.reliability:.6f}, activate={operative.activate}")
    return EXIT_OK


def cmd_linkdb(args: argparse.Namespace) -> int:
    """Ingest a topology, fold in observations, and extract a path."""
    db = _read_topology(args)
    timestamp = isoparse(args.at) if args.at else None
    for text in args.observe or []:
        try:
            src, dst, sent, lost = text.split(',')
            obs = LinkObservation(src, dst, sent=int(sent), lost=int(lost), timestamp=timestamp)
        except (TypeError, ValueError) as e:
            raise ValueError(f"Observation must be SRC,DST,SENT,LOST; got {text!r} ({e})")
        db.update_stats(obs)

    snapshot = _output(args, 'linkdb_snapshot', 'json')
    db.persist(snapshot)
    _write_manifest(args, snapshot)

    if args.path:
        result = db.extract_path(args.path[0], args.path[1], nc_only=args.nc_only)
        _write_json(args, 'linkdb_path', {
            'found': result.found,
            'nodes': result.nodes,
            'deltas': list(result.profile.deltas) if result.found else [],
            'labels': list(result.profile.labels) if result.found else [],
        })
        logger.info(f"Path {args.path[0]} -> {args.path[1]}: "
                    f"{' -> '.join(result.nodes) if result.found else 'none'}")
    db.close()
    return EXIT_OK


def cmd_rerun(args: argparse.Namespace) -> int:
    """Re-execute the run recorded in a manifest."""
    manifest = RunManifest.load(args.manifest)
    if manifest.subcommand not in COMMANDS:
        raise ValueError(f"Manifest names unknown subcommand {manifest.subcommand!r}")
    if manifest.version != VERSION:
        logger.warning(f"Manifest written by version {manifest.version}, running {VERSION}")
    params = dict(manifest.params)
    if args.out:
        params['out'] = args.out
    replay = argparse.Namespace(command=manifest.subcommand, **params)
    logger.info(f"Rerunning {manifest.subcommand} from {args.manifest}")
    return COMMANDS[manifest.subcommand](replay)


COMMANDS = {
    'rate-region': cmd_rate_region,
    'reliability': cmd_reliability,
    'connectivity': cmd_connectivity,
    'validate': cmd_validate,
    'lifecycle-demo': cmd_lifecycle_demo,
    'optimize': cmd_optimize,
    'linkdb': cmd_linkdb,
}


# Argument parsing

def _common(parser: argparse.ArgumentParser, code: bool = True):
    parser.add_argument('--seed', type=int, default=DEFAULT_SEED, help='Random seed')
    parser.add_argument('--out', default=OUTPUT_DIR, help='Output directory')
    parser.add_argument('--format', choices=['csv', 'json'], default='csv', help='Table format')
    if code:
        parser.add_argument('--k', type=int, default=DEFAULT_K, help='Information packets per generation')
        parser.add_argument('--L', type=int, default=DEFAULT_L, help='Packet length in bytes')
        parser.add_argument('--q', type=int, choices=SUPPORTED_Q, default=DEFAULT_Q, help='Field exponent')


def _gate_ceiling(text: str) -> float:
    """A named level (very-low, low, high) or a number of gates."""
    if text in BETA0_LEVELS:
        return BETA0_LEVELS[text]
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a gate count or one of {sorted(BETA0_LEVELS)}, got {text!r}")


def _budget(parser: argparse.ArgumentParser, levels: List[float], scope: str = 'source'):
    parser.add_argument('--beta0-source', type=_gate_ceiling, nargs='+', default=levels,
                        help='Source gate ceiling(s)')
    parser.add_argument('--beta0-relay', type=_gate_ceiling, default=None, help='Relay gate ceiling')
    parser.add_argument('--beta0-dest', type=_gate_ceiling, default=None, help='Destination gate ceiling')
    parser.add_argument('--budget-scope', choices=['all', 'source'], default=scope,
                        help='Constrain every role or only the source encoder')
    parser.add_argument('--mode', choices=[m.value for m in SelectionMode],
                        default=SelectionMode.UTILITY_ARGMAX.value, help='Block-length selection')


def _topology(parser: argparse.ArgumentParser, db: str = IN_MEMORY):
    parser.add_argument('--topology', default=SAMPLE_TOPOLOGY, help='Topology JSON document')
    parser.add_argument('--db', default=db, help='SQLite file for the link database')
    parser.add_argument('--alpha', type=float, default=EWMA_ALPHA, help='EWMA smoothing factor')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description='Systematic network coding toolkit')
    parser.add_argument('--version', action='version', version=VERSION)
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('rate-region', help='Two-hop rate region grids')
    _common(p)
    p.add_argument('--eta0', type=float, default=DEFAULT_ETA0, help='Target residual erasure rate')
    p.add_argument('--rate-min', type=float, default=RATE_WINDOW[0])
    p.add_argument('--rate-max', type=float, default=RATE_WINDOW[1])
    p.add_argument('--grid-step', type=float, default=GRID_STEP)
    p.add_argument('--max-delta', type=float, default=GRID_MAX_DELTA)
    p.add_argument('--delta', type=float, default=None, help='First-link erasure rate of a single cell')
    p.add_argument('--delta2', type=float, default=None, help='Second-link erasure rate (default: --delta)')
    p.add_argument('--defaults', action='store_true', help='Use the reference configuration and check it')
    p.set_defaults(func=cmd_rate_region)

    p = sub.add_parser('reliability', help='Reliability gain sweep over path length')
    _common(p)
    _budget(p, [BETA0_LOW, BETA0_HIGH])
    p.add_argument('--delta', type=float, nargs='+', default=list(SWEEP_DELTAS))
    p.add_argument('--rho0', type=float, default=DEFAULT_RHO0)
    p.add_argument('--hops', type=int, default=SWEEP_H_MAX, help='Longest path length')
    p.add_argument('--delta2', type=float, default=None, help='Erasure rate of the second link')
    p.add_argument('--defaults', action='store_true')
    p.set_defaults(func=cmd_reliability)

    p = sub.add_parser('connectivity', help='Connectivity gain table')
    _common(p)
    _budget(p, [BETA0_VERY_LOW, BETA0_LOW, BETA0_HIGH])
    p.add_argument('--delta', type=float, nargs='+', default=list(SWEEP_DELTAS))
    p.add_argument('--rho0', type=float, nargs='+', default=list(SWEEP_RHO0))
    p.add_argument('--h-limit', type=int, default=CONNECTIVITY_H_LIMIT)
    p.add_argument('--defaults', action='store_true')
    p.set_defaults(func=cmd_connectivity)

    p = sub.add_parser('validate', help='Monte-Carlo validation of the analytic model')
    _common(p, code=False)
    p.add_argument('--q', type=int, choices=SUPPORTED_Q, default=DEFAULT_Q)
    p.add_argument('--code', nargs='+', default=[f"{k},{n}" for k, n in VALIDATION_GRID['codes']],
                   help='Codes as k,n')
    p.add_argument('--delta', type=float, nargs='+', default=list(VALIDATION_GRID['deltas']))
    p.add_argument('--hops', type=int, default=max(VALIDATION_GRID['hops']))
    p.add_argument('--trials', type=int, default=MC_TRIALS)
    p.add_argument('--z', type=float, default=ORACLE_Z)
    p.add_argument('--workers', type=int, default=WORKERS)
    p.add_argument('--partial-policy', choices=[p_.value for p_ in PartialPolicy],
                   default=PartialPolicy.ZERO_FILL.value)
    p.add_argument('--perturb', type=float, default=0.0, help='Offset added to analytic values')
    p.add_argument('--engine', choices=[e.value for e in SimEngine], default=SimEngine.RANK.value,
                   help='rank: block row reduction; packet: payloads through the codec')
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser('lifecycle-demo', help='Scripted VGNCF lifecycle scenario')
    _common(p)
    _budget(p, [BETA0_HIGH], scope='all')
    _topology(p)
    p.add_argument('--rho0', type=float, default=DEFAULT_RHO0)
    p.add_argument('--spike', type=float, default=0.5, help='Loss ratio injected on every path link')
    p.add_argument('--sent', type=int, default=1000, help='Packets per link per report')
    p.add_argument('--resource-units', type=int, default=DEFAULT_RESOURCE_UNITS)
    p.set_defaults(func=cmd_lifecycle_demo)

    p = sub.add_parser('optimize', help='Optimize the coding rate for one path')
    _common(p)
    _budget(p, [BETA0_HIGH], scope='all')
    p.add_argument('--delta', type=float, nargs='+', default=[0.1], help='Per-link erasure rates')
    p.add_argument('--hops', type=int, default=2, help='Path length when one delta is given')
    p.add_argument('--delta2', type=float, default=None, help='Replaces the second link erasure rate')
    p.add_argument('--rho0', type=float, default=DEFAULT_RHO0)
    p.add_argument('--exhaustive', action='store_true')
    p.add_argument('--audit-points', type=int, default=TERNARY_AUDIT_POINTS)
    p.add_argument('--policy', choices=[r.value for r in RangePolicy], default=RangePolicy.TARGET.value)
    p.add_argument('--u-floor', type=float, default=None)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser('linkdb', help='Link database operations')
    _common(p, code=False)
    _topology(p, db=LINKDB_PATH)
    p.add_argument('--observe', action='append', help='Observation SRC,DST,SENT,LOST (repeatable)')
    p.add_argument('--at', default=None, help='ISO-8601 time of the observations')
    p.add_argument('--path', nargs=2, metavar=('SOURCE', 'SINK'))
    p.add_argument('--nc-only', action='store_true')
    p.set_defaults(func=cmd_linkdb)

    p = sub.add_parser('rerun', help='Re-execute a run manifest')
    p.add_argument('manifest')
    p.add_argument('--out', default=None)
    p.set_defaults(func=cmd_rerun)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point with CLI."""
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging()

    logger.info("=" * 60)
    logger.info(f"Running {args.command}")
    logger.info("=" * 60)
    try:
        code = args.func(args)
    except (ValueError, OSError) as e:
        logger.error(f"Bad input: {e}")
        code = EXIT_BAD_INPUT
    logger.info("=" * 60)
    logger.info(f"{args.command} finished with exit code {code}")
    logger.info("=" * 60)
    return code


if __name__ == '__main__':
    sys.exit(main())
