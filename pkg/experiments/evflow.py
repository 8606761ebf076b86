import sys
import os

sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), '../'))

import argparse
from dataclasses import dataclass, field

import numpy as np
import wandb

from datasets.augmentation import AugmentationConfig
from datasets.event_slice_dataset import EventSliceDataset
from datasets.synthetic_scene import (RigidMotion, SimWindow, random_scene, read_scene, simulate,
                                      synthetic_recordings)
from egomotion import SOLVERS, NormalFlowObs, NegativeDepthConfig, SVMConfig, angle_between
from egomotion.imu import time_weighted_mean
from events.event_io import (read_camera, read_csv, read_event_flows, read_events, write_csv, write_event_flows,
                             write_events)
from events.event_types import EventCloud, Recording
from events.flow_frames import FlowFrameStack, per_event_flows
from experiments.experiment_utils import format_config, get_rtpt, set_num_threads, set_seed, train
from metrics.flow_metrics import evaluate_flow, per_window_breakdown, window_ids
from metrics.velocity import rms_velocity
from models.model_io import load_model
from models.normal_flow_estimator import NormalFlowEstimator
from models.normal_flow_mlp import NormalFlowMLP
from models.veckm import Encoding, NeighborhoodSpec, RandomProjection, VecKMEncoder
from uncertainty.ensemble import EnsembleConfig, RotationEnsemble
from utils.dataset_utils import MAX_EVENTS_PER_SLICE, get_train_val_split, subsample_events
from utils.errors import (DegenerateGeometry, EmptyPredictions, EventFlowError, InsufficientData, LengthMismatch,
                          UsageError, ZeroSolution)
from utils.plotting import get_density_plot, rasterize_flow, save_ppm
from utils.training import TrainConfig
from utils.wandb_utils import init_wandb, log_prediction_table


@dataclass
class RunConfig:
    """
    Effective configuration of one command line invocation.
    """
    command: str
    seed: int
    neighborhood: NeighborhoodSpec
    projection: dict
    ensemble: EnsembleConfig
    train: TrainConfig
    augmentation: AugmentationConfig
    svm: SVMConfig
    negative_depth: NegativeDepthConfig
    paths: dict = field(default_factory=dict)

    @classmethod
    def from_args(cls, args):
        paths = {
            k: v
            for k, v in vars(args).items()
            if k in ('scene', 'out', 'gt', 'imu', 'motion', 'events', 'model', 'pred', 'data', 'val_data', 'log',
                     'camera', 'flow', 'per_window', 'dump_encoding', 'scale_gt')
        }
        return cls(
            command=args.command,
            seed=args.seed,
            neighborhood=NeighborhoodSpec(args.dt, args.dx, args.dy),
            projection={'seed': args.seed, 'd': args.dim, 'sigma2': args.sigma2},
            ensemble=EnsembleConfig(K=args.ensembles, threshold=args.unc_thresh),
            train=TrainConfig(
                epsilon=args.eps,
                lr=args.lr,
                epochs=args.epochs,
                steps_per_epoch=args.steps,
                seed=args.seed,
                slice_length=args.slice,
                cosine_annealing=not args.constant_lr
            ),
            augmentation=AugmentationConfig(
                rotation=not args.no_rotation,
                scale_range=(args.scale_min, args.scale_max),
                sample_range=(args.sample_min, args.sample_max)
            ),
            svm=SVMConfig(lam=args.lam, max_iterations=args.svm_iterations),
            negative_depth=NegativeDepthConfig(),
            paths=paths
        )

    def sections(self):
        return {
            'run': {
                'command': self.command,
                'seed': self.seed
            },
            'neighborhood': self.neighborhood,
            'projection': self.projection,
            'ensemble': self.ensemble,
            'train': self.train,
            'augmentation': self.augmentation,
            'svm': self.svm,
            'negative_depth': self.negative_depth,
            'paths': self.paths,
        }


def parse_vector(text: str) -> np.ndarray:
    try:
        values = np.array([float(v) for v in text.split(',')])
    except ValueError:
        raise UsageError(f'Invalid vector "{text}", expected three comma separated numbers')
    if len(values) != 3:
        raise UsageError(f'Invalid vector "{text}", expected three comma separated numbers')
    return values


def require(args, *names):
    for name in names:
        if getattr(args, name) in (None, []):
            raise UsageError(f'{args.command} requires --{name.replace("_", "-")}')


def build_encoder(args, proj: RandomProjection) -> VecKMEncoder:
    return VecKMEncoder(NeighborhoodSpec(args.dt, args.dx, args.dy), proj)


# --------------------------------------
# SUBCOMMANDS
# --------------------------------------


def cmd_simulate(args):
    if args.scene is None and args.random_edges is None:
        raise UsageError('simulate requires --scene or --random-edges')
    edges = read_scene(args.scene) if args.scene is not None else random_scene(args.seed, args.random_edges)
    motion = RigidMotion(parse_vector(args.v), parse_vector(args.w))
    window = SimWindow(args.t_start, args.t_start + args.t)
    recording = simulate(edges, motion, window, seed=args.seed)
    cloud = recording.cloud

    write_events(args.out, cloud)
    write_csv(
        args.gt, {
            't': cloud.t,
            'x': cloud.x,
            'y': cloud.y,
            'ux': recording.flows[:, 0],
            'uy': recording.flows[:, 1],
            'nx': recording.normal_flows[:, 0],
            'ny': recording.normal_flows[:, 1],
            'Z': recording.depths
        }
    )
    # the motion is constant, so both side outputs are sampled at a fixed rate
    samples = np.arange(window.t_start, window.t_end + 0.5 / args.imu_rate, 1.0 / args.imu_rate)
    if args.imu is not None:
        write_csv(
            args.imu, {
                't': samples,
                'wx': np.full(len(samples), motion.Omega[0]),
                'wy': np.full(len(samples), motion.Omega[1]),
                'wz': np.full(len(samples), motion.Omega[2])
            }
        )
    if args.motion is not None:
        write_csv(
            args.motion, {
                't': samples,
                'vx': np.full(len(samples), motion.V[0]),
                'vy': np.full(len(samples), motion.V[1]),
                'vz': np.full(len(samples), motion.V[2])
            }
        )
    print(f'Simulated {len(cloud)} events from {len(edges)} edges over [{window.t_start}, {window.t_end}]s')
    return 0


def load_recordings(paths):
    recordings = []
    for path in paths:
        cloud, flows = read_event_flows(path)
        recordings.append(Recording(cloud, flows))
    return recordings


def cmd_train(args):
    if args.epochs < 1 or args.steps < 1:
        raise UsageError(f'train needs positive --epochs and --steps, got {args.epochs} --steps {args.steps}')
    cfg = RunConfig.from_args(args)
    set_seed(args.seed)
    window = SimWindow(0.0, args.scene_duration)
    if args.data:
        train_recordings = load_recordings(args.data)
        if args.val_data:
            val_recordings = load_recordings(args.val_data)
        elif len(train_recordings) > 1 and args.train_fraction < 1:
            train_recordings, val_recordings = get_train_val_split(train_recordings, args.train_fraction, args.seed)
        else:
            val_recordings = []
    else:
        print(f'Simulating {args.num_scenes} training and {args.val_scenes} validation scenes')
        train_recordings = synthetic_recordings(args.num_scenes, seed=args.seed, window=window)
        val_recordings = synthetic_recordings(args.val_scenes, seed=args.seed + 1, window=window)

    proj = RandomProjection(seed=args.seed, d=args.dim, sigma2=args.sigma2)
    encoder = build_encoder(args, proj)
    train_set = EventSliceDataset(
        train_recordings,
        encoder,
        slice_length=args.slice,
        max_events=args.max_events,
        norm_range=cfg.train.norm_range,
        samples_per_epoch=args.steps,
        seed=args.seed,
        augmentation=cfg.augmentation
    )
    val_set = None
    if val_recordings:
        val_set = EventSliceDataset(
            val_recordings,
            encoder,
            slice_length=args.slice,
            max_events=args.max_events,
            norm_range=cfg.train.norm_range,
            samples_per_epoch=max(1, args.steps // 5),
            seed=args.seed + 1
        )

    model = NormalFlowMLP(encoding_dim=args.dim, hidden_layer_list=args.hidden)
    rtpt = get_rtpt('evflow_train', args.epochs) if args.rtpt else None
    if args.wandb:
        init_wandb(args, job_type='train')
    losses = train(
        model,
        train_set,
        val_set,
        cfg.train,
        proj,
        loss_name=args.loss,
        filename=args.out,
        log_file=args.log,
        rtpt=rtpt,
        wandb=wandb if args.wandb else None
    )
    print(f'Saved model to {args.out} (final loss {losses[-1]:.6f})')
    return 0


def cmd_infer(args):
    require(args, 'events', 'model')
    cloud = read_events(args.events)
    model, proj = load_model(args.model, sigma2=args.sigma2)
    estimator = NormalFlowEstimator(model, build_encoder(args, proj))
    ensemble = RotationEnsemble(
        estimator,
        EnsembleConfig(K=args.ensembles, threshold=args.unc_thresh),
        slice_length=args.slice,
        max_events=args.max_events,
        seed=args.seed,
        log_progress=True
    )
    prediction = ensemble(cloud)
    write_csv(
        args.out, {
            't': cloud.t,
            'x': cloud.x,
            'y': cloud.y,
            'nx': prediction.n_hat[:, 0],
            'ny': prediction.n_hat[:, 1],
            'sigma': prediction.sigma,
            'valid': prediction.valid.astype(np.int64)
        }
    )
    print(f'Predicted {len(cloud)} events, {int(prediction.valid.sum())} valid')

    if args.dump_encoding is not None:
        dump_encoding(args, cloud, estimator.encoder).save(args.dump_encoding)
    if args.wandb:
        init_wandb(args, job_type='infer')
        log_prediction_table(cloud.t, cloud.x, cloud.y, prediction.n_hat, prediction.sigma, prediction.valid)
        wandb.log({'valid_fraction': float(prediction.valid.mean())})
    return 0


def dump_encoding(args, cloud: EventCloud, encoder: VecKMEncoder) -> Encoding:
    """
    Encodes the cloud slice by slice with the same subsampling as inference. Rows of dropped events stay zero.
    """
    G = np.zeros((len(cloud), encoder.d), dtype=np.complex128)
    counts = np.zeros(len(cloud), dtype=np.int64)
    windows = window_ids(cloud.t, args.slice)
    for window in np.unique(windows):
        indices = np.flatnonzero(windows == window)
        indices = indices[subsample_events(len(indices), args.max_events, [args.seed, int(window)])]
        encoding = encoder(cloud.subset(indices))
        G[indices] = encoding.G
        counts[indices] = encoding.neighbor_counts
    return Encoding(G, counts)


def cmd_eval_flow(args):
    require(args, 'gt')
    gt = read_csv(args.gt, ['t', 'x', 'y', 'ux', 'uy'])
    u = gt[['ux', 'uy']].values
    t = gt['t'].values
    valid, sigma = None, None
    if args.use_gt_normal:
        if 'nx' not in gt.columns or 'ny' not in gt.columns:
            raise UsageError(f'{args.gt} has no ground truth normal flow columns nx,ny')
        n_hat = gt[['nx', 'ny']].values
    else:
        require(args, 'pred')
        pred = read_csv(args.pred, ['t', 'x', 'y', 'nx', 'ny'])
        if len(pred) != len(gt):
            raise LengthMismatch(f'{len(pred)} predictions given for {len(gt)} ground truth events')
        n_hat = pred[['nx', 'ny']].values
        if 'valid' in pred.columns:
            valid = pred['valid'].values.astype(bool)
        if 'sigma' in pred.columns:
            finite = pred['sigma'].values[np.isfinite(pred['sigma'].values)]
            # the correlation is undefined for the constant sigma of a disabled ensemble
            if len(np.unique(finite)) > 1:
                sigma = pred['sigma'].values

    report = evaluate_flow(u, n_hat, valid, window_ids(t, args.window), sigma)
    print(report.summary())
    print(report.details())
    if args.per_window is not None:
        write_csv(
            args.per_window,
            {
                key: [getattr(r, key) for r in per_window_breakdown(t, u, n_hat, valid, args.window)]
                for key in ['t_start', 't_end', 'pee', 'pos_pct', 'n', 'masked']
            }
        )
    if args.wandb:
        init_wandb(args, job_type='eval')
        wandb.log({'pee': report.pee_mean, 'pos_pct': report.pos_pct, 'pos_pct_all': report.pos_pct_all})
    return 0


def cmd_egomotion(args):
    require(args, 'pred')
    pred = read_csv(args.pred, ['t', 'x', 'y', 'nx', 'ny'])
    t = pred['t'].values
    x = pred[['x', 'y']].values
    n_hat = pred[['nx', 'ny']].values
    valid = pred['valid'].values.astype(bool) if 'valid' in pred.columns else np.ones(len(pred), dtype=bool)
    if len(pred) == 0:
        raise InsufficientData(f'{args.pred} does not contain any prediction')

    imu = read_csv(args.imu, ['t', 'wx', 'wy', 'wz']) if args.imu is not None else None
    motion = read_csv(args.scale_gt, ['t', 'vx', 'vy', 'vz']) if args.scale_gt is not None else None
    if args.solver == 'negdepth':
        solver = SOLVERS[args.solver](NegativeDepthConfig())
    else:
        solver = SOLVERS[args.solver](SVMConfig(lam=args.lam, max_iterations=args.svm_iterations))

    rows = {k: [] for k in ['t_start', 't_end', 'vx', 'vy', 'vz', 'inlier_fraction']}
    estimates, gt_velocities, errors = [], [], []
    windows = window_ids(t, args.window)
    for window in np.unique(windows):
        t_start = t[0] + window * args.window
        t_end = t_start + args.window
        selected = (windows == window) & valid
        obs = NormalFlowObs.from_normal_flow(x[selected], n_hat[selected])
        if imu is not None:
            omega0 = time_weighted_mean(imu['t'].values, imu[['wx', 'wy', 'wz']].values, t_start, t_end)
        else:
            omega0 = np.zeros(3)
        try:
            estimate = solver(obs, omega0)
        except (InsufficientData, DegenerateGeometry, ZeroSolution) as e:
            print(f'Skipping window [{t_start:.4f}, {t_end:.4f}]: {type(e).__name__}: {e}')
            continue

        V = estimate.V
        if motion is not None:
            gt_v = time_weighted_mean(motion['t'].values, motion[['vx', 'vy', 'vz']].values, t_start, t_end)
            V = V * np.linalg.norm(gt_v)
            estimates.append(V)
            gt_velocities.append(gt_v)
            errors.append(angle_between(estimate.V, gt_v))
        rows['t_start'].append(t_start)
        rows['t_end'].append(t_end)
        rows['vx'].append(V[0])
        rows['vy'].append(V[1])
        rows['vz'].append(V[2])
        rows['inlier_fraction'].append(estimate.inlier_fraction)

    if not rows['t_start']:
        raise InsufficientData('No time window contained enough observations for a translation estimate')
    write_csv(args.out, rows)
    print(f'{solver.display_name}: estimated {len(rows["t_start"])} of {len(np.unique(windows))} windows')
    if motion is not None:
        print(f'RMS={rms_velocity(np.array(estimates), np.array(gt_velocities)):.6f} m/s')
        print(f'Median angular error={np.median(errors):.4f} deg')
    return 0


def cmd_plot(args):
    require(args, 'pred')
    pred = read_csv(args.pred, ['t', 'x', 'y', 'nx', 'ny'])
    if len(pred) == 0:
        raise EmptyPredictions(f'{args.pred} does not contain any prediction')
    valid = pred['valid'].values.astype(bool) if 'valid' in pred.columns else None
    image = rasterize_flow(
        pred['x'].values,
        pred['y'].values,
        pred[['nx', 'ny']].values,
        valid,
        width=args.width,
        height=args.height
    )
    save_ppm(args.out, image)
    print(f'Wrote {args.width}x{args.height} flow image to {args.out}')
    return 0


def cmd_plot_density(args):
    require(args, 'events')
    cloud = read_events(args.events)
    if not 0 <= args.index < len(cloud):
        raise UsageError(f'Event index {args.index} is out of range for {len(cloud)} events')
    if args.model is not None:
        _, proj = load_model(args.model, sigma2=args.sigma2)
    else:
        proj = RandomProjection(seed=args.seed, d=args.dim, sigma2=args.sigma2)
    encoder = build_encoder(args, proj)

    t_event = cloud.t[args.index]
    indices = cloud.time_slice(t_event - args.dt, t_event + args.dt)
    row = encoder(cloud.subset(indices)).G[np.searchsorted(indices, args.index)]
    f, _ = get_density_plot(row, proj, figure_kwargs={'figsize': (10, 4)})
    f.savefig(args.out, bbox_inches='tight')
    print(f'Wrote density reconstruction of event {args.index} to {args.out}')
    return 0


def cmd_preprocess(args):
    require(args, 'events', 'camera', 'flow')
    raw = read_csv(args.events, ['t', 'x', 'y'])
    camera = read_camera(args.camera)
    stack = FlowFrameStack.load(args.flow, camera)
    flows, normalized = per_event_flows(stack, camera, raw['t'].values, raw['x'].values, raw['y'].values)
    polarity = raw['p'].values if 'p' in raw.columns else None
    cloud = EventCloud(raw['t'].values, normalized[:, 0], normalized[:, 1], polarity)
    write_event_flows(args.out, cloud, flows)
    if args.out_events is not None:
        write_events(args.out_events, cloud)
    print(f'Wrote per-event flow of {len(cloud)} events to {args.out}')
    return 0


COMMANDS = {
    'simulate': cmd_simulate,
    'train': cmd_train,
    'infer': cmd_infer,
    'eval-flow': cmd_eval_flow,
    'egomotion': cmd_egomotion,
    'plot': cmd_plot,
    'plot-density': cmd_plot_density,
    'preprocess': cmd_preprocess,
}

# --------------------------------------
# ARGUMENTS
# --------------------------------------


def common_arguments() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument('--seed', default=0, type=int, help='The seed to use')
    parser.add_argument('--print-config', action='store_true', help='Print all effective settings and exit')
    parser.add_argument('--wandb', action='store_true', help='Log results to Weights & Biases')
    parser.add_argument('--dt', default=0.02, type=float, help='Temporal neighborhood radius in seconds')
    parser.add_argument('--dx', default=0.02, type=float, help='Horizontal neighborhood radius in normalized pixels')
    parser.add_argument('--dy', default=0.02, type=float, help='Vertical neighborhood radius in normalized pixels')
    parser.add_argument('--dim', default=384, type=int, help='Dimension of the local event encoding')
    parser.add_argument('--sigma2', default=25.0, type=float, help='Variance of the random projection entries')
    parser.add_argument('--eps', default=0.1, type=float, help='Epsilon of the motion field loss')
    parser.add_argument('--ensembles', default=5, type=int, help='Number of rotated copies per prediction')
    parser.add_argument('--unc-thresh', default=0.3, type=float, help='Maximal circular std of a valid prediction')
    parser.add_argument('--slice', default=0.02, type=float, help='Length of the event slices in seconds')
    parser.add_argument(
        '--max-events', default=MAX_EVENTS_PER_SLICE, type=int, help='Maximal number of encoded events per slice'
    )
    parser.add_argument('--lr', default=1e-3, type=float, help='Learning rate of Adam')
    parser.add_argument('--constant-lr', action='store_true', help='Disable the cosine annealing of the learning rate')
    parser.add_argument('--epochs', default=10, type=int, help='Number of training epochs')
    parser.add_argument('--steps', default=50, type=int, help='Number of slices per training epoch')
    parser.add_argument('--no-rotation', action='store_true', help='Disable the random rotation augmentation')
    parser.add_argument('--scale-min', default=0.75, type=float)
    parser.add_argument('--scale-max', default=1.25, type=float)
    parser.add_argument('--sample-min', default=0.5, type=float)
    parser.add_argument('--sample-max', default=1.0, type=float)
    parser.add_argument('--lam', default=1e-4, type=float, help='Regularization weight of the SVM')
    parser.add_argument('--svm-iterations', default=5000, type=int, help='Maximal number of SVM iterations')
    return parser


def build_parser() -> argparse.ArgumentParser:
    common = common_arguments()
    parser = argparse.ArgumentParser(prog='evflow', description='Normal flow estimation and egomotion from events')
    subparsers = parser.add_subparsers(dest='command')

    simulate_parser = subparsers.add_parser('simulate', parents=[common], help='Simulate events of a scene')
    simulate_parser.add_argument('--scene', default=None, type=str, help='Scene file with one edge per line')
    simulate_parser.add_argument('--random-edges', default=None, type=int, help='Simulate a random scene instead')
    simulate_parser.add_argument('--v', default='0,0,1', type=str, help='Linear velocity vx,vy,vz')
    simulate_parser.add_argument('--w', default='0,0,0', type=str, help='Angular velocity wx,wy,wz')
    simulate_parser.add_argument('--t', default=0.5, type=float, help='Duration of the simulation in seconds')
    simulate_parser.add_argument('--t-start', default=0.0, type=float)
    simulate_parser.add_argument('--out', default='events.evt', type=str)
    simulate_parser.add_argument('--gt', default='gt.csv', type=str)
    simulate_parser.add_argument('--imu', default=None, type=str, help='Write a constant rate IMU file')
    simulate_parser.add_argument('--motion', default=None, type=str, help='Write the ground truth velocity')
    simulate_parser.add_argument('--imu-rate', default=200.0, type=float)

    train_parser = subparsers.add_parser('train', parents=[common], help='Train the normal flow head')
    train_parser.add_argument('--data', nargs='*', default=[], help='Per-event flow files t,x,y,ux,uy')
    train_parser.add_argument('--val-data', nargs='*', default=[], help='Validation flow files')
    train_parser.add_argument(
        '--train-fraction', default=0.8, type=float, help='Share of the --data files used for training without --val-data'
    )
    train_parser.add_argument('--num-scenes', default=20, type=int, help='Number of simulated training scenes')
    train_parser.add_argument('--val-scenes', default=4, type=int, help='Number of simulated validation scenes')
    train_parser.add_argument('--scene-duration', default=0.2, type=float)
    train_parser.add_argument('--hidden', nargs='+', default=[256, 256, 256], type=int)
    train_parser.add_argument('--loss', default='motion_field', choices=['motion_field', 'norm_direction'])
    train_parser.add_argument('--out', default='model.nfm', type=str)
    train_parser.add_argument('--log', default=None, type=str, help='CSV file of the per epoch losses')
    train_parser.add_argument('--rtpt', action='store_true')

    infer_parser = subparsers.add_parser('infer', parents=[common], help='Predict normal flow with uncertainty')
    infer_parser.add_argument('--events', default=None, type=str)
    infer_parser.add_argument('--model', default=None, type=str)
    infer_parser.add_argument('--out', default='pred.csv', type=str)
    infer_parser.add_argument('--dump-encoding', default=None, type=str, help='Write the encodings as VKM1')

    eval_parser = subparsers.add_parser('eval-flow', parents=[common], help='Evaluate predicted normal flow')
    eval_parser.add_argument('--pred', default=None, type=str)
    eval_parser.add_argument('--gt', default=None, type=str)
    eval_parser.add_argument('--use-gt-normal', action='store_true', help='Evaluate the ground truth normal flow')
    eval_parser.add_argument('--window', default=0.02, type=float)
    eval_parser.add_argument('--per-window', default=None, type=str, help='Write per window metrics')

    ego_parser = subparsers.add_parser('egomotion', parents=[common], help='Estimate the translation direction')
    ego_parser.add_argument('--pred', default=None, type=str)
    ego_parser.add_argument('--imu', default=None, type=str, help='Angular velocity file t,wx,wy,wz')
    ego_parser.add_argument('--solver', default='svm', choices=sorted(SOLVERS.keys()))
    ego_parser.add_argument('--window', default=0.02, type=float)
    ego_parser.add_argument('--out', default='egomotion.csv', type=str)
    ego_parser.add_argument('--scale-gt', default=None, type=str, help='Velocity file t,vx,vy,vz for scaling')

    plot_parser = subparsers.add_parser('plot', parents=[common], help='Render predictions as HSV image')
    plot_parser.add_argument('--pred', default=None, type=str)
    plot_parser.add_argument('--out', default='flow.ppm', type=str)
    plot_parser.add_argument('--width', default=346, type=int)
    plot_parser.add_argument('--height', default=260, type=int)

    density_parser = subparsers.add_parser('plot-density', parents=[common], help='Plot an encoded neighborhood')
    density_parser.add_argument('--events', default=None, type=str)
    density_parser.add_argument('--model', default=None, type=str, help='Take the projection from a model file')
    density_parser.add_argument('--index', default=0, type=int)
    density_parser.add_argument('--out', default='density.png', type=str)

    preprocess_parser = subparsers.add_parser('preprocess', parents=[common], help='Per-event flow from frames')
    preprocess_parser.add_argument('--events', default=None, type=str, help='Raw events t,x,y[,p] in pixels')
    preprocess_parser.add_argument('--camera', default=None, type=str)
    preprocess_parser.add_argument('--flow', default=None, type=str, help='Flow frame stack as .npz')
    preprocess_parser.add_argument('--out', default='flows.csv', type=str)
    preprocess_parser.add_argument('--out-events', default=None, type=str)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help()
        return 2
    try:
        set_num_threads()
        if args.print_config:
            print(format_config(RunConfig.from_args(args).sections()))
            return 0
        return COMMANDS[args.command](args)
    except EventFlowError as e:
        print(f'error: {type(e).__name__}: {e}', file=sys.stderr)
        return e.exit_code
    except (ValueError, OSError) as e:
        print(f'error: {type(e).__name__}: {e}', file=sys.stderr)
        return 2


if __name__ == '__main__':
    sys.exit(main())
