import os
from platform import system

import nox

CONDA_PYTHON_VERSIONS = ('3.7', '3.8', '3.9')
PYTORCH_VERSIONS = ('1.5.1', '1.8.1', '1.10.2')
NUMBA_STATUSES = ('numba_enabled', 'numba_disabled')
NOX_WIN_NUMPY_VERSION = '1.17.4'  # avoid errors from more recent Numpy called through Nox on Windows
PYTORCH_IDS = tuple([f'pytorch_{i}' for i in PYTORCH_VERSIONS])
NUMBA_IDS = tuple([f'{i}'.lower() for i in NUMBA_STATUSES])


def install_pytorch(pytorch, session, numpy=None):
    is_win = system() == 'Windows'
    cmd = ['-c', 'pytorch', f'pytorch=={pytorch}', 'cpuonly']
    if numpy is not None:
        cmd += [f'numpy=={numpy}']
    elif is_win:
        cmd += [f'numpy=={NOX_WIN_NUMPY_VERSION}']
    session.conda_install(*cmd)


def install_torchvision(pytorch, session):
    session.conda_install('-c', 'pytorch', 'torchvision', 'cpuonly')


def extras(numba_status, *names):
    names = list(names)
    if numba_status == 'numba_enabled':
        names.append('numba')
    return '.[{}]'.format(', '.join(names))


@nox.session(venv_backend="conda", python=CONDA_PYTHON_VERSIONS)
@nox.parametrize("pytorch", PYTORCH_VERSIONS, ids=PYTORCH_IDS)
@nox.parametrize("numba_status", NUMBA_STATUSES, ids=NUMBA_IDS)
def tests_vggfer_cpu(session, pytorch, numba_status):
    session.env['VGGFER_NUMBA'] = '{}'.format(int(numba_status == 'numba_enabled'))
    install_pytorch(pytorch, session)
    session.install('--upgrade', extras(numba_status, 'test'))
    session.run('pytest', 'test/vggfer', '-v')


@nox.session(venv_backend="conda", python=CONDA_PYTHON_VERSIONS)
@nox.parametrize("pytorch", PYTORCH_VERSIONS, ids=PYTORCH_IDS)
@nox.parametrize("numba_status", NUMBA_STATUSES, ids=NUMBA_IDS)
def tests_vggfer_examples_cpu(session, pytorch, numba_status):
    session.env['VGGFER_NUMBA'] = '{}'.format(int(numba_status == 'numba_enabled'))
    install_pytorch(pytorch, session)
    install_torchvision(pytorch, session)  # For the weight converter
    session.install('--upgrade', extras(numba_status, 'test', 'vision', 'plot'))
    session.run('pytest', 'test/vggfer_examples')


@nox.session(venv_backend="conda", python=CONDA_PYTHON_VERSIONS)
@nox.parametrize("pytorch", PYTORCH_VERSIONS, ids=PYTORCH_IDS)
def tests_vggfer_install_dev(session, pytorch):
    install_pytorch(pytorch, session)
    session.install('--upgrade', '-e', '.[test]')
    session.env['VGGFER_VERBOSE'] = '1'
    session.run('pytest', '-v', 'test/vggfer/test_vggfer_import.py')


@nox.session(venv_backend="conda", python=CONDA_PYTHON_VERSIONS)
@nox.parametrize("pytorch", PYTORCH_VERSIONS, ids=PYTORCH_IDS)
def tests_vggfer_examples_install_dev(session, pytorch):
    install_pytorch(pytorch, session)
    session.install('--upgrade', '-e', '.[test]')
    session.run('pytest', '-v', 'test/vggfer_examples/test_examples_import.py')


@nox.session(venv_backend="conda", python=CONDA_PYTHON_VERSIONS)
@nox.parametrize("pytorch", PYTORCH_VERSIONS, ids=PYTORCH_IDS)
def tests_vggfer_real_weights(session, pytorch):
    if 'VGGFER_REAL_WEIGHTS' not in os.environ:
        session.skip('VGGFER_REAL_WEIGHTS does not point at a converted bundle')
    install_pytorch(pytorch, session)
    session.install('--upgrade', '.[test]')
    session.run('pytest', '-v', 'test/vggfer/test_real_weights.py')
