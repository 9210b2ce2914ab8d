import logging
import os
from pathlib import Path

import hydra
import wandb
import wandb.wandb_run
from omegaconf import DictConfig, OmegaConf

from simplex_hoeffding.oracles.audit import ROW_FIELDS, AuditReport
from simplex_hoeffding.utils.records import row_cells, write_report
from simplex_hoeffding.utils.sweep import make_sweep_config, run_sweep

DEFAULT_RESULTS_DIR = f'{Path(__file__).parent.parent}/results'


# function that wraps setup of the wandb run
def setup_wandb(config: DictConfig) -> wandb.wandb_run.Run:
    os.environ['WANDB_DIR'] = DEFAULT_RESULTS_DIR if config.sweep.output.dir is None else config.sweep.output.dir
    wandb_tags = config.wandb.tags
    wandb_run = wandb.init(project=config.wandb.project_name,
                           config={
                               'family': config.sweep.family,
                               'directions': list(config.sweep.directions),
                               'model': config.sweep.model,
                               **OmegaConf.to_container(config.sweep.oracle),
                           },
                           name=config.sweep.name,
                           tags=wandb_tags if wandb_tags is not None else [],
                           reinit=True)
    return wandb_run


def log_report(wandb_run: wandb.wandb_run.Run, report: AuditReport) -> None:
    summary = report.summary()
    wandb_run.log({f'audit/{key}': value for key, value in summary.items()})
    table = wandb.Table(columns=list(ROW_FIELDS), data=[row_cells(row, ROW_FIELDS) for row in report.to_records()])
    wandb_run.log({'audit/rows': table})


# runs the domination audit of the composed sweep config and writes JSON / CSV reports
@hydra.main(config_path="conf", config_name="config", version_base=None)
def main(config: DictConfig):
    if config.sweep.oracle.seed is None:
        config.sweep.oracle.seed = 42
        logging.warning("No seed provided. Using default seed 42.")

    sweep_config = make_sweep_config(config.sweep)

    # setup wandb run if project name is provided
    wandb_run = setup_wandb(config) if config.wandb.project_name is not None else None

    report = run_sweep(sweep_config, workers=config.workers, disable_pbar=config.disable_pbar)
    out_dir = DEFAULT_RESULTS_DIR if sweep_config.output.dir is None else sweep_config.output.dir
    paths = write_report(report, Path(out_dir), sweep_config.name, sweep_config.output.format)

    summary = report.summary()
    logging.info(f"Sweep {sweep_config.name}: {summary['pass']} PASS, {summary['fail']} FAIL, {summary['skip']} SKIP. "
                 f"Reports written to {', '.join(str(p) for p in paths)}")
    if wandb_run is not None:
        log_report(wandb_run, report)
        wandb_run.finish()


if __name__ == '__main__':
    main()
