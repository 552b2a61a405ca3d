# BSD 3-Clause License
# Copyright (c) 2021, the vggfer authors

import logging
import os
import sys

LOG_NAME = 'vggfer'
LOG_FORMAT = '%(asctime)s %(message)s'


class AverageMeter(object):
    """Computes and stores the average and current value"""

    def __init__(self):
        self.reset()

    def reset(self):
        self.val = 0
        self.avg = 0
        self.sum = 0
        self.count = 0

    def update(self, val, n=1):
        self.val = val
        self.sum += val * n
        self.count += n
        self.avg = self.sum / self.count


class Logger(object):

    def __init__(self, output_dir_path=None):
        self.output_dir_path = output_dir_path
        self.log = logging.getLogger(LOG_NAME)
        self.log.setLevel(logging.INFO)
        self.log.propagate = False
        # library warnings arrive through the py.warnings logger
        logging.captureWarnings(True)
        self.warnings_log = logging.getLogger('py.warnings')
        self.warnings_log.propagate = False
        self._remove_handlers()

        # Stdout logging
        out_hdlr = logging.StreamHandler(sys.stdout)
        out_hdlr.setFormatter(logging.Formatter(LOG_FORMAT))
        out_hdlr.setLevel(logging.INFO)
        self._add_handler(out_hdlr)

        # Txt logging
        if output_dir_path is not None and os.path.isdir(output_dir_path):
            self.log_to_dir(output_dir_path)

    def log_to_dir(self, output_dir_path):
        os.makedirs(output_dir_path, exist_ok=True)
        self.output_dir_path = output_dir_path
        file_hdlr = logging.FileHandler(os.path.join(output_dir_path, 'log.txt'))
        file_hdlr.setFormatter(logging.Formatter(LOG_FORMAT))
        file_hdlr.setLevel(logging.INFO)
        self._add_handler(file_hdlr)

    def _add_handler(self, hdlr):
        self.log.addHandler(hdlr)
        self.warnings_log.addHandler(hdlr)

    def _remove_handlers(self):
        for log in (self.log, self.warnings_log):
            for hdlr in list(log.handlers):
                log.removeHandler(hdlr)
                if isinstance(hdlr, logging.FileHandler):
                    hdlr.close()

    def close(self):
        self._remove_handlers()
        logging.captureWarnings(False)

    def info(self, arg):
        self.log.info(arg)

    def error(self, arg):
        self.log.error(arg)

    def layer_timing_cli_log(self, layer, meter, index, total):
        self.info('Layer: [{0}/{1}] {2}\tTime {time.val:.3f} ({time.avg:.3f})'.format(
            index, total, layer, time=meter))
