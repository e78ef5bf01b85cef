import sys


SUM_FREQ = 100

class Logger:
    """ running means of scalar diagnostics, mirrored to tensorboard when a run is named """

    def __init__(self, name, logdir="runs", freq=SUM_FREQ, stream=sys.stderr):
        self.total_steps = 0
        self.running = {}
        self.writer = None
        self.name = name
        self.logdir = logdir
        self.freq = freq
        self.stream = stream

    def _writer(self):
        if self.writer is None and self.logdir is not None:
            from torch.utils.tensorboard import SummaryWriter
            self.writer = SummaryWriter('%s/%s' % (self.logdir, self.name))
        return self.writer

    def _print_status(self):
        metrics_data = [self.running[k]/self.freq for k in self.running]
        status_str = "[{:6d}] {} ".format(self.total_steps+1, self.name)
        metrics_str = ", ".join("{}={:10.4g}".format(k, v) for k, v in zip(self.running, metrics_data))

        # print the status line
        print(status_str + metrics_str, file=self.stream)

        writer = self._writer()
        for key in self.running:
            if writer is not None:
                writer.add_scalar(key, self.running[key]/self.freq, self.total_steps)
            self.running[key] = 0.0

    def push(self, metrics):
        for key in metrics:
            if key not in self.running:
                self.running[key] = 0.0

            self.running[key] += metrics[key]

        if self.total_steps % self.freq == self.freq-1:
            self._print_status()
            self.running = {}

        self.total_steps += 1

    def write_dict(self, results):
        writer = self._writer()
        for key in results:
            print("{}: {}".format(key, results[key]), file=self.stream)
            if writer is not None:
                writer.add_scalar(key, results[key], self.total_steps)

    def close(self):
        if self.writer is not None:
            self.writer.close()
