from setuptools import setup
import fmdpy

with open('./README.md', encoding='utf-8') as f:
    readme = f.read()

setup(
    name='fmdpy',
    version=fmdpy.__version__,
    keywords='factored MDP, approximate value iteration, reinforcement learning, optimistic exploration',
    description='Factored MDP planning and optimistic-initial-model learning with linear value approximation',
    long_description=readme,
    long_description_content_type='text/markdown',
    license='MIT',
    python_requires='>=3.8.0',
    packages=[
        'fmdpy', 'fmdpy.core', 'fmdpy.approx', 'fmdpy.oracle', 'fmdpy.learn', 'fmdpy.env', 'fmdpy.format',
        'fmdpy.harness', 'fmdpy.cmd', 'fmdpy.utils'
    ],
    entry_points={'console_scripts': ['fmdpy=fmdpy.cmd.cli:fmdpy_cli']},
    install_requires=['Redy>=0.2.9', 'rbnf>=0.3.21', 'wisepy', 'numpy>=1.17', 'pandas>=1.5', 'yapf'],
    platforms='any',
    classifiers=[
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: Implementation :: CPython'
    ],
    zip_safe=False)
