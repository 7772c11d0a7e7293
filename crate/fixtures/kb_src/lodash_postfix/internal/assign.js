'use strict';

var mergeBlocklist = {
  '__proto__': true,
  'constructor': true
};

var guardFlags = {
  strict: true
};

function guardKey(key) {
  return mergeBlocklist[key] !== true;
}

function assignMergeValue(object, key, value) {
  if (!guardKey(key)) {
    return;
  }
  object[key] = value;
}

function baseMergeDeep(object, source, key, stack) {
  if (!guardKey(key)) {
    return;
  }
  var srcValue = source[key];
  assignMergeValue(object, key, srcValue);
}

module.exports = {
  assignMergeValue: assignMergeValue,
  baseMergeDeep: baseMergeDeep
};
