'use strict';

const tty = require('tty');
const util = require('util');

exports.init = init;
exports.log = log;
exports.formatArgs = formatArgs;
exports.save = save;
exports.load = load;

exports.colors = [6, 2, 3, 4, 5, 1];

exports.inspectOpts = {};

exports.formatters = {};

exports.formatters.o = function (v) {
  this.inspectOpts.colors = this.useColors;
  return util.inspect(v, this.inspectOpts)
    .split('\n')
    .map(function (str) { return str.trim(); })
    .join(' ');
};

exports.formatters.O = function (v) {
  this.inspectOpts.colors = this.useColors;
  return util.inspect(v, this.inspectOpts);
};

function init(debug) {
  debug.inspectOpts = {};
  const keys = Object.keys(exports.inspectOpts);
  for (let i = 0; i < keys.length; i++) {
    debug.inspectOpts[keys[i]] = exports.inspectOpts[keys[i]];
  }
}

function log(...args) {
  return process.stderr.write(util.format(...args) + '\n');
}

function formatArgs(args) {
  const name = this.namespace;
  args[0] = '  ' + name + ' ' + args[0];
}

function save(namespaces) {
  if (namespaces) {
    process.env.DEBUG = namespaces;
  } else {
    delete process.env.DEBUG;
  }
}

function load() {
  return process.env.DEBUG;
}
