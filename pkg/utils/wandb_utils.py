import wandb


def init_wandb(args, project='evflow', job_type=None):
    """
    Starts a wandb run with all command line arguments as config.
    """
    return wandb.init(project=project, job_type=job_type, config=vars(args))


def log_prediction_table(t, x, y, n_hat, sigma, valid, max_rows=1000):
    "Log a wandb.Table with (t, x, y, nx, ny, sigma, valid) of the first `max_rows` events"
    table = wandb.Table(columns=["t", "x", "y", "nx", "ny", "sigma", "valid"])
    for i in range(min(len(t), max_rows)):
        table.add_data(
            float(t[i]), float(x[i]), float(y[i]), float(n_hat[i, 0]), float(n_hat[i, 1]), float(sigma[i]),
            bool(valid[i])
        )
    wandb.log({"predictions_table": table}, commit=False)
