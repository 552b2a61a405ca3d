# BSD 3-Clause License
# Copyright (c) 2021, the vggfer authors

import os
import re

from setuptools import setup, find_packages


PROJECT_ROOT = os.path.dirname(os.path.abspath(__file__))
REQUIREMENTS_DIR = os.path.join(PROJECT_ROOT, 'requirements')


def read(*path):
    return open(os.path.join(*path)).read()


def read_requirements(filename):
    return read(REQUIREMENTS_DIR, filename).splitlines()


def read_version():
    return re.search(r"^__version__ = '([^']+)'", read(PROJECT_ROOT, 'vggfer', '__init__.py'), re.M).group(1)


setup(name="vggfer",
      version=read_version(),
      description="Facial expression recognition with frozen VGG19 features, PCA and linear SVMs",
      long_description=read(PROJECT_ROOT, 'README.md'),
      long_description_content_type="text/markdown",
      author="vggfer authors",
      python_requires=">=3.7",
      setup_requires=read_requirements('requirements-setup.txt'),
      install_requires=read_requirements('requirements.txt'),
      extras_require={
          "test": read_requirements('requirements-test.txt'),
          "vision": read_requirements('requirements-vision.txt'),
          "numba": read_requirements('requirements-numba.txt'),
          "plot": read_requirements('requirements-plot.txt')
      },
      packages=find_packages(exclude=['test', 'test.*']),
      zip_safe=False,
      package_data={
          '': ['*.ini'],
      },
      entry_points={
          'console_scripts': [
              'vggfer = vggfer_examples.expression_recognition.fer_cli:main',
              'vggfer_convert_weights = vggfer_examples.expression_recognition.convert_torchvision_weights:main',
              'vggfer_compare_reference = vggfer_examples.expression_recognition.compare_reference:main',
              'vggfer_plot_summary = vggfer_examples.expression_recognition.plot_summary:main'
          ],
      })
