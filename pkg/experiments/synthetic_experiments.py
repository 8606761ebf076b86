import sys
import os

sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), '../'))

import argparse
import time

import numpy as np
import wandb
from tqdm.autonotebook import tqdm

from datasets.augmentation import AugmentationConfig
from datasets.event_slice_dataset import EventSliceDataset
from datasets.synthetic_scene import SimWindow, random_motion, random_scene, simulate, synthetic_recordings
from egomotion import NegativeDepthSolver, NormalFlowObs, SVMSolver, angle_between
from experiments.experiment_utils import (print_flow_report, set_num_threads, set_seed, train, write_results_to_csv)
from metrics.flow_metrics import evaluate_flow, window_ids
from models.normal_flow_estimator import NormalFlowEstimator
from models.normal_flow_mlp import NormalFlowMLP
from models.veckm import NeighborhoodSpec, RandomProjection, VecKMEncoder
from uncertainty.ensemble import EnsembleConfig, RotationEnsemble, aggregate, ensemble_predict
from utils.errors import DegenerateGeometry, EmptyInput, InsufficientData, ZeroSolution
from utils.training import TrainConfig

parser = argparse.ArgumentParser(description='Desk scale experiments on simulated scenes')
parser.add_argument('--seed', default=0, type=int, help='The seed to use')
parser.add_argument('--dim', default=384, type=int, help='Dimension of the local event encoding')
parser.add_argument('--hidden', default=[256, 256, 256], type=int, nargs='+', help='Hidden layer widths of the head')
parser.add_argument('--epochs', default=10, type=int, help='Number of training epochs per model')
parser.add_argument('--steps', default=50, type=int, help='Number of slices per training epoch')
parser.add_argument('--num_scenes', default=20, type=int, help='Number of simulated training scenes')
parser.add_argument('--test_scenes', default=4, type=int, help='Number of simulated test scenes')
parser.add_argument('--ego_seeds', default=20, type=int, help='Number of scenes for the egomotion comparison')
parser.add_argument('--ego_observations', default=1000, type=int, help='Observations per egomotion window')
parser.add_argument('--noise_deg', default=10.0, type=float, help='Std of the direction noise in degrees')
parser.add_argument('--outliers', default=0.1, type=float, help='Fraction of sign flipped observations')
parser.add_argument('--runtime_events', default=80000, type=int, help='Number of events for the runtime test')
parser.add_argument('--output_dir', default='results', type=str, help='Directory for the result CSV files')
parser.add_argument('--wandb', action='store_true')

# --------------------------------------
# NORMAL FLOW EXPERIMENTS
# --------------------------------------


def train_head(args, train_recordings, loss_name):
    set_seed(args.seed)
    proj = RandomProjection(seed=args.seed, d=args.dim)
    encoder = VecKMEncoder(NeighborhoodSpec(), proj)
    train_set = EventSliceDataset(
        train_recordings, encoder, samples_per_epoch=args.steps, seed=args.seed, augmentation=AugmentationConfig()
    )
    model = NormalFlowMLP(encoding_dim=args.dim, hidden_layer_list=args.hidden)
    cfg = TrainConfig(epochs=args.epochs, steps_per_epoch=args.steps, seed=args.seed)
    print(f'Training normal flow head with the {loss_name} loss')
    train(model, train_set, None, cfg, proj, loss_name=loss_name, wandb=wandb if args.wandb else None)
    return NormalFlowEstimator(model, encoder)


def evaluate_recordings(estimator, test_recordings, ensemble_cfg):
    predictor = RotationEnsemble(estimator, ensemble_cfg)
    u, n_hat, valid, sigma, windows = [], [], [], [], []
    for i, recording in enumerate(test_recordings):
        prediction = predictor(recording.cloud)
        u.append(recording.flows)
        n_hat.append(prediction.n_hat)
        valid.append(prediction.valid)
        sigma.append(prediction.sigma)
        # keep the windows of different recordings apart
        windows.append(window_ids(recording.cloud.t, 0.02) + 100000 * i)
    return evaluate_flow(
        np.concatenate(u),
        np.concatenate(n_hat),
        np.concatenate(valid),
        np.concatenate(windows),
        np.concatenate(sigma) if ensemble_cfg.K > 1 else None
    )


def loss_ablation(args, train_recordings, test_recordings):
    rows, estimators = [], {}
    for loss_name in ['motion_field', 'norm_direction']:
        estimator = train_head(args, train_recordings, loss_name)
        report = evaluate_recordings(estimator, test_recordings, EnsembleConfig(K=1))
        print_flow_report(loss_name, report)
        rows.append({'loss': loss_name, 'pee': report.pee_mean, 'pos_pct': report.pos_pct})
        estimators[loss_name] = estimator
    return rows, estimators['motion_field']


def ensemble_study(estimator, test_recordings):
    rows = []
    for K in tqdm([1, 3, 5, 8], desc='Ensemble size'):
        for threshold in [0.1, 0.3, 0.5, 1e9]:
            if K == 1 and threshold != 1e9:
                continue
            try:
                report = evaluate_recordings(estimator, test_recordings, EnsembleConfig(K=K, threshold=threshold))
            except EmptyInput:
                print(f'K={K} threshold={threshold}: no valid prediction left')
                continue
            total = report.n_evaluated + report.n_masked + report.n_invalid
            rows.append(
                {
                    'K': K,
                    'threshold': threshold,
                    'pee': report.pee_mean,
                    'pos_pct': report.pos_pct,
                    'pos_pct_all': report.pos_pct_all,
                    'valid_fraction': 1.0 - report.n_invalid / total,
                    'spearman': report.spearman
                }
            )
            print_flow_report(f'K={K} threshold={threshold}', report)
    return rows


def runtime(args, estimator):
    """
    Wall clock time of encoding one slice and predicting it with a five member ensemble.
    """
    # about 500 events per edge in a 20 ms window
    edges = random_scene(args.seed, num_edges=max(8, args.runtime_events // 400), extent=0.3)
    recording = simulate(edges, random_motion(args.seed), SimWindow(0.0, 0.02), seed=args.seed)
    cloud = recording.cloud.subset(np.arange(min(len(recording.cloud), args.runtime_events)))
    start = time.perf_counter()
    encoding = estimator.encode(cloud)
    encode_time = time.perf_counter() - start
    start = time.perf_counter()
    aggregate(ensemble_predict(cloud, estimator, EnsembleConfig(K=5)), EnsembleConfig(K=5))
    total_time = time.perf_counter() - start
    print(f'Runtime for {len(cloud)} events: encoding {encode_time:.3f}s, K=5 ensemble {total_time:.3f}s')
    return [{'events': len(cloud), 'dim': len(encoding.G[0]), 'encode_s': encode_time, 'ensemble_s': total_time}]


# --------------------------------------
# EGOMOTION EXPERIMENTS
# --------------------------------------


def noisy_observations(recording, num_observations, noise_deg, outliers, rng):
    """
    Ground truth normal flow of a random subset of events, with rotated directions and flipped signs.
    """
    usable = np.flatnonzero(np.linalg.norm(recording.normal_flows, axis=1) > 1e-8)
    selected = np.sort(rng.choice(usable, size=min(num_observations, len(usable)), replace=False))
    x = recording.cloud.coordinates[selected, 1:]
    n = recording.normal_flows[selected]

    angles = np.deg2rad(rng.normal(0.0, noise_deg, size=len(n)))
    c, s = np.cos(angles), np.sin(angles)
    n = np.stack([c * n[:, 0] - s * n[:, 1], s * n[:, 0] + c * n[:, 1]], axis=1)
    flipped = rng.random(len(n)) < outliers
    n[flipped] *= -1
    return NormalFlowObs.from_normal_flow(x, n)


def dense_scene(seed):
    """
    Many short edges filling the central field of view, so that edge lines surround the focus of expansion.
    """
    return random_scene(seed, num_edges=1500, extent=0.3, length_range=(0.02, 0.06), events_per_length=100.0)


def solver_comparison(args):
    solvers = [SVMSolver(), NegativeDepthSolver()]
    rows = []
    for seed in tqdm(range(args.ego_seeds), desc='Egomotion scenes'):
        motion = random_motion([args.seed, seed, 1])
        edges = dense_scene([args.seed, seed, 0])
        recording = simulate(edges, motion, SimWindow(0.0, 0.01), seed=[args.seed, seed, 2])
        rng = np.random.default_rng([args.seed, seed, 3])
        obs = noisy_observations(recording, args.ego_observations, args.noise_deg, args.outliers, rng)
        row = {'scene': seed}
        for solver in solvers:
            try:
                estimate = solver(obs, motion.Omega)
                row[solver.display_name] = angle_between(estimate.V, motion.V)
            except (InsufficientData, DegenerateGeometry, ZeroSolution) as e:
                print(f'Scene {seed}: {solver.display_name} failed with {type(e).__name__}')
                row[solver.display_name] = np.nan
        rows.append(row)

    for solver in solvers:
        errors = np.array([r[solver.display_name] for r in rows])
        print(f'{solver.display_name}: median angular error {np.nanmedian(errors):.3f} deg over {len(rows)} scenes')
    return rows


def desk_recordings(args):
    """
    Simulated training and held-out test recordings of 200 ms each.
    """
    window = SimWindow(0.0, 0.2)
    print(f'Simulating {args.num_scenes} training and {args.test_scenes} test scenes')
    train_recordings = synthetic_recordings(args.num_scenes, seed=args.seed, window=window)
    test_recordings = synthetic_recordings(args.test_scenes, seed=args.seed + 1000, window=window)
    return train_recordings, test_recordings


if __name__ == '__main__':
    args = parser.parse_args()
    set_num_threads()
    if args.wandb:
        wandb.init(project='evflow', job_type='synthetic_experiments', config=args)

    train_recordings, test_recordings = desk_recordings(args)
    loss_rows, estimator = loss_ablation(args, train_recordings, test_recordings)
    write_results_to_csv(os.path.join(args.output_dir, 'loss_ablation.csv'), loss_rows)
    write_results_to_csv(os.path.join(args.output_dir, 'ensemble_study.csv'), ensemble_study(estimator, test_recordings))
    write_results_to_csv(os.path.join(args.output_dir, 'runtime.csv'), runtime(args, estimator))
    write_results_to_csv(os.path.join(args.output_dir, 'solver_comparison.csv'), solver_comparison(args))
