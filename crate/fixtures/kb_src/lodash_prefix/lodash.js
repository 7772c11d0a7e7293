'use strict';

var assign = require('./internal/assign');

function baseMerge(object, source) {
  for (var key in source) {
    assign.assignMergeValue(object, key, source[key]);
  }
  return object;
}

function safeGet(object, key) {
  return object[key];
}

function mergeWith(object, source, customizer) {
  if (typeof customizer !== 'function') {
    customizer = undefined;
  }
  return baseMerge(object, source);
}

function legacyMergeGuard(value) {
  return value !== null;
}

module.exports = {
  merge: baseMerge,
  mergeWith: mergeWith,
  safeGet: safeGet,
  legacyMergeGuard: legacyMergeGuard
};
