'use strict';

var assign = require('./internal/assign');

var unsafeKeys = {
  '__proto__': true,
  'constructor': true,
  'prototype': true
};

var protoSentinels = {
  guard: '__proto__'
};

function isKeySafe(key) {
  return unsafeKeys[key] !== true;
}

function baseMerge(object, source) {
  for (var key in source) {
    if (!isKeySafe(key)) {
      continue;
    }
    assign.assignMergeValue(object, key, source[key]);
  }
  return object;
}

function safeGet(object, key) {
  if (key === 'constructor' || key === '__proto__') {
    return undefined;
  }
  return object[key];
}

function mergeWith(object, source, customizer) {
  if (typeof customizer !== 'function') {
    customizer = undefined;
  }
  return baseMerge(object, source);
}

module.exports = {
  merge: baseMerge,
  mergeWith: mergeWith,
  safeGet: safeGet,
  isKeySafe: isKeySafe
};
